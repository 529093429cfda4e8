#include "hazsvm/data.hpp"

#include "hazsvm/csv.hpp"
#include "hazsvm/error.hpp"
#include "hazsvm/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

namespace hazsvm {

std::size_t Dataset::count(Label label) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [label](const auto& s) { return s.label == label; }));
}

void Dataset::validate() const {
  std::set<std::string_view> seen;
  for (const auto& name : feature_names) {
    if (name.empty()) {
      throw Error(ErrorKind::argument, "feature names must be non-empty");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::argument, "duplicate feature name '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.features.size() != feature_names.size()) {
      throw Error(ErrorKind::shape, "sample " + std::to_string(i) + " has " +
                                        std::to_string(s.features.size()) + " features, expected " +
                                        std::to_string(feature_names.size()));
    }
    if (s.label != Label::hazard && s.label != Label::normal) {
      throw Error(ErrorKind::label, "sample " + std::to_string(i) + " has a label other than +1/-1");
    }
    for (double v : s.features) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::argument, "sample " + std::to_string(i) + " has a non-finite value");
      }
    }
  }
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.samples.reserve(indices.size());
  for (auto i : indices) {
    out.samples.push_back(data.samples.at(i));
  }
  return out;
}

void require_both_classes(const Dataset& data, std::string_view context) {
  if (data.count(Label::hazard) == 0 || data.count(Label::normal) == 0) {
    throw Error(ErrorKind::degenerate_labels,
                std::string(context) + ": degenerate labels (both classes required, got " +
                    std::to_string(data.count(Label::hazard)) + " hazard / " +
                    std::to_string(data.count(Label::normal)) + " normal)");
  }
}

// ---------------------------------------------------------------------------

namespace {

std::optional<Label> parse_label(std::string_view token) {
  if (token == "1" || token == "+1" || token == "hazard") {
    return Label::hazard;
  }
  if (token == "-1" || token == "normal") {
    return Label::normal;
  }
  return std::nullopt;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

} // namespace

Dataset load_labeled_csv(std::istream& source, const CsvOptions& options) {
  csv::Reader reader(source, options.source_name, options.delimiter);
  auto header = reader.next();
  if (!header) {
    throw Error(ErrorKind::empty_input, options.source_name + ": empty file");
  }
  const auto& names = header->cells;
  if (names.size() < 2 || names.back() != "label") {
    throw Error(ErrorKind::parse, where(options.source_name, header->line) +
                                      ": header must have at least one feature and end with 'label'");
  }

  Dataset data;
  data.feature_names.assign(names.begin(), names.end() - 1);
  const std::size_t width = names.size();

  while (auto row = reader.next()) {
    if (row->cells.size() != width) {
      throw Error(ErrorKind::parse, where(options.source_name, row->line) + ": expected " +
                                        std::to_string(width) + " columns, got " +
                                        std::to_string(row->cells.size()));
    }
    LabeledSample sample;
    sample.features.reserve(width - 1);
    for (std::size_t c = 0; c + 1 < width; ++c) {
      auto value = csv::parse_double(row->cells[c]);
      if (!value) {
        throw Error(ErrorKind::parse, where(options.source_name, row->line) + ": column '" +
                                          data.feature_names[c] + "': not a number: '" +
                                          row->cells[c] + "'");
      }
      sample.features.push_back(*value);
    }
    auto label = parse_label(row->cells.back());
    if (!label) {
      throw Error(ErrorKind::label, where(options.source_name, row->line) +
                                        ": unknown label token '" + row->cells.back() + "'");
    }
    sample.label = *label;
    data.samples.push_back(std::move(sample));
  }
  data.validate();
  return data;
}

Dataset load_labeled_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, path + ": cannot open for reading");
  }
  return load_labeled_csv(in, CsvOptions{path});
}

void write_labeled_csv(std::ostream& out, const Dataset& data) {
  for (const auto& name : data.feature_names) {
    out << name << ',';
  }
  out << "label\n";
  for (const auto& s : data.samples) {
    for (double v : s.features) {
      out << csv::format_double(v) << ',';
    }
    out << (s.label == Label::hazard ? "1" : "-1") << '\n';
  }
}

// ---------------------------------------------------------------------------

FeatureVector NormalizationStats::apply(std::span<const double> raw) const {
  if (raw.size() != mean.size()) {
    throw Error(ErrorKind::shape, "normalize: row has " + std::to_string(raw.size()) +
                                      " features, stats have " + std::to_string(mean.size()));
  }
  FeatureVector out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    out[j] = stddev[j] > 0.0 ? (raw[j] - mean[j]) / stddev[j] : 0.0;
  }
  return out;
}

NormalizationStats NormalizationStats::identity(std::size_t feature_count) {
  return {std::vector<double>(feature_count, 0.0), std::vector<double>(feature_count, 1.0)};
}

NormalizationStats fit_normalizer(const Dataset& data) {
  if (data.empty()) {
    throw Error(ErrorKind::empty_input, "fit_normalizer: empty dataset");
  }
  const std::size_t d = data.feature_count();
  const auto n = static_cast<double>(data.size());
  NormalizationStats stats{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& s : data.samples) {
    for (std::size_t j = 0; j < d; ++j) {
      stats.mean[j] += s.features[j];
    }
  }
  for (auto& m : stats.mean) {
    m /= n;
  }
  // Two-pass variance.
  for (const auto& s : data.samples) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = s.features[j] - stats.mean[j];
      stats.stddev[j] += dev * dev;
    }
  }
  for (auto& sd : stats.stddev) {
    sd = std::sqrt(sd / n);
  }
  return stats;
}

Dataset normalize(const NormalizationStats& stats, const Dataset& data) {
  if (stats.feature_count() != data.feature_count()) {
    throw Error(ErrorKind::shape, "normalize: stats cover " +
                                      std::to_string(stats.feature_count()) + " features, data has " +
                                      std::to_string(data.feature_count()));
  }
  Dataset out;
  out.feature_names = data.feature_names;
  out.samples.reserve(data.size());
  for (const auto& s : data.samples) {
    out.samples.push_back({stats.apply(s.features), s.label});
  }
  return out;
}

// ---------------------------------------------------------------------------

FeatureVector FeatureMask::apply(std::span<const double> row) const {
  if (row.size() != original_count()) {
    throw Error(ErrorKind::shape, "feature mask: row has " + std::to_string(row.size()) +
                                      " features, mask expects " + std::to_string(original_count()));
  }
  FeatureVector out;
  out.reserve(kept_indices.size());
  for (auto j : kept_indices) {
    out.push_back(row[j]);
  }
  return out;
}

FeatureMask FeatureMask::all(std::size_t feature_count) {
  FeatureMask mask;
  mask.kept_indices.resize(feature_count);
  std::iota(mask.kept_indices.begin(), mask.kept_indices.end(), std::size_t{0});
  mask.correlations.assign(feature_count, std::nullopt);
  return mask;
}

FeatureMask select_features_by_correlation(const Dataset& data, double min_abs_r) {
  if (!(min_abs_r >= 0.0 && min_abs_r <= 1.0)) {
    throw Error(ErrorKind::argument, "min_abs_r must lie in [0, 1]");
  }
  if (data.size() < 2) {
    throw Error(ErrorKind::empty_input, "correlation selection needs at least 2 samples");
  }
  require_both_classes(data, "correlation selection");

  const std::size_t d = data.feature_count();
  const auto n = static_cast<double>(data.size());

  double label_mean = 0.0;
  for (const auto& s : data.samples) {
    label_mean += to_real(s.label);
  }
  label_mean /= n;

  FeatureMask mask;
  mask.correlations.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (const auto& s : data.samples) {
      mean += s.features[j];
    }
    mean /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& s : data.samples) {
      const double dx = s.features[j] - mean;
      const double dy = to_real(s.label) - label_mean;
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
    if (sxx <= 0.0) {
      continue; // undefined r
    }
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    mask.correlations[j] = r;
    if (std::abs(r) >= min_abs_r) {
      mask.kept_indices.push_back(j);
    }
  }
  return mask;
}

Dataset apply_mask(const FeatureMask& mask, const Dataset& data) {
  if (mask.original_count() != data.feature_count()) {
    throw Error(ErrorKind::shape, "feature mask expects " + std::to_string(mask.original_count()) +
                                      " features, data has " + std::to_string(data.feature_count()));
  }
  Dataset out;
  for (auto j : mask.kept_indices) {
    out.feature_names.push_back(data.feature_names[j]);
  }
  out.samples.reserve(data.size());
  for (const auto& s : data.samples) {
    out.samples.push_back({mask.apply(s.features), s.label});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> class_indices(const Dataset& data, Label label) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.samples[i].label == label) {
      idx.push_back(i);
    }
  }
  return idx;
}

} // namespace

SplitIndices stratified_split_indices(const Dataset& data, double test_fraction,
                                      std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::argument, "test fraction must lie in (0, 1)");
  }
  if (data.empty()) {
    throw Error(ErrorKind::empty_input, "stratified_split: empty dataset");
  }
  SplitIndices split;
  std::uint64_t stream = 0;
  for (Label label : {Label::hazard, Label::normal}) {
    auto idx = class_indices(data, label);
    Rng rng(derive_seed(seed, stream++));
    std::shuffle(idx.begin(), idx.end(), rng);
    if (idx.empty()) {
      continue;
    }
    auto n_test = static_cast<std::size_t>(std::lround(static_cast<double>(idx.size()) * test_fraction));
    n_test = std::min(n_test, idx.size() - 1);
    split.test.insert(split.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

TrainTest stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  const auto idx = stratified_split_indices(data, test_fraction, seed);
  return {subset(data, idx.train), subset(data, idx.test)};
}

std::vector<std::vector<std::size_t>> stratified_kfold_indices(const Dataset& data, int k,
                                                               std::uint64_t seed) {
  if (k < 2) {
    throw Error(ErrorKind::argument, "k must be at least 2");
  }
  const auto folds = static_cast<std::size_t>(k);
  std::vector<std::vector<std::size_t>> validation(folds);
  std::size_t next_fold = 0;
  std::uint64_t stream = 0;
  for (Label label : {Label::hazard, Label::normal}) {
    auto idx = class_indices(data, label);
    if (idx.size() < folds) {
      throw Error(ErrorKind::stratification,
                  std::string("class ") + (label == Label::hazard ? "hazard" : "normal") + " has " +
                      std::to_string(idx.size()) + " samples, fewer than k = " + std::to_string(k));
    }
    Rng rng(derive_seed(seed, stream++));
    std::shuffle(idx.begin(), idx.end(), rng);
    // Continue dealing where the previous class stopped so total fold sizes
    // also stay within one of each other.
    for (auto i : idx) {
      validation[next_fold].push_back(i);
      next_fold = (next_fold + 1) % folds;
    }
  }
  for (auto& fold : validation) {
    std::sort(fold.begin(), fold.end());
  }
  return validation;
}

std::vector<Fold> stratified_kfold(const Dataset& data, int k, std::uint64_t seed) {
  const auto validation = stratified_kfold_indices(data, k, seed);
  std::vector<Fold> folds;
  folds.reserve(validation.size());
  std::vector<char> in_fold(data.size());
  for (const auto& v : validation) {
    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (auto i : v) {
      in_fold[i] = 1;
    }
    std::vector<std::size_t> train;
    train.reserve(data.size() - v.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!in_fold[i]) {
        train.push_back(i);
      }
    }
    folds.push_back({subset(data, train), subset(data, v)});
  }
  return folds;
}

} // namespace hazsvm
