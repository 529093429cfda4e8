#include "hazsvm_cli/model_io.hpp"

#include "hazsvm/error.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace hazsvm::cli {

using nlohmann::json;

std::string utc_timestamp_now() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto day = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{now - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

void save_model(std::ostream& out, const ModelFile& file) {
  const auto& m = file.model;
  json correlations = json::array();
  for (const auto& r : m.feature_mask.correlations) {
    correlations.push_back(r ? json(*r) : json(nullptr));
  }
  json doc = {
      {"format_version", kModelFormatVersion},
      {"kernel", {{"kind", std::string(to_string(m.kernel.kind))}, {"gamma", m.kernel.gamma}}},
      {"c", m.c},
      {"bias", m.bias},
      {"support_vectors", m.support_vectors},
      {"dual_coefficients", m.dual_coefficients},
      {"support_indices", m.support_indices},
      {"normalization", {{"mean", m.normalization.mean}, {"stddev", m.normalization.stddev}}},
      {"feature_mask", {{"kept_indices", m.feature_mask.kept_indices}, {"correlations", correlations}}},
      {"feature_names", file.feature_names},
      {"training",
       {{"samples", file.training.samples},
        {"hazard", file.training.hazard},
        {"normal", file.training.normal},
        {"working_samples", file.training.working_samples},
        {"seed", file.training.seed},
        {"trained_at", file.training.trained_at}}},
  };
  if (m.weight_vector) {
    doc["weight_vector"] = *m.weight_vector;
  }
  out << doc.dump(2) << '\n';
}

void save_model_file(const std::string& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::io, path + ": cannot open for writing");
  }
  save_model(out, file);
  if (!out) {
    throw Error(ErrorKind::io, path + ": write failed");
  }
}

namespace {

[[noreturn]] void corrupt(const std::string& source, const std::string& what) {
  throw Error(ErrorKind::format, source + ": malformed model file: " + what);
}

void require(bool ok, const std::string& source, const std::string& what) {
  if (!ok) {
    corrupt(source, what);
  }
}

} // namespace

ModelFile load_model(std::istream& in, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    corrupt(source_name, e.what());
  }
  require(doc.is_object(), source_name, "top level is not an object");
  require(doc.contains("format_version") && doc["format_version"].is_number_integer(), source_name,
          "missing format_version");
  const int version = doc["format_version"].get<int>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorKind::version, source_name + ": unsupported model format_version " +
                                        std::to_string(version) + " (this build reads " +
                                        std::to_string(kModelFormatVersion) + ")");
  }

  ModelFile file;
  auto& m = file.model;
  try {
    const auto& k = doc.at("kernel");
    m.kernel.kind = parse_kernel_kind(k.at("kind").get<std::string>());
    m.kernel.gamma = k.at("gamma").get<double>();
    m.c = doc.at("c").get<double>();
    m.bias = doc.at("bias").get<double>();
    m.support_vectors = doc.at("support_vectors").get<std::vector<FeatureVector>>();
    m.dual_coefficients = doc.at("dual_coefficients").get<std::vector<double>>();
    m.support_indices = doc.at("support_indices").get<std::vector<std::size_t>>();
    m.normalization.mean = doc.at("normalization").at("mean").get<std::vector<double>>();
    m.normalization.stddev = doc.at("normalization").at("stddev").get<std::vector<double>>();
    m.feature_mask.kept_indices = doc.at("feature_mask").at("kept_indices").get<std::vector<std::size_t>>();
    for (const auto& r : doc.at("feature_mask").at("correlations")) {
      m.feature_mask.correlations.push_back(r.is_null() ? std::nullopt
                                                        : std::optional<double>(r.get<double>()));
    }
    if (doc.contains("weight_vector")) {
      m.weight_vector = doc.at("weight_vector").get<std::vector<double>>();
    }
    file.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& t = doc.at("training");
    file.training.samples = t.at("samples").get<std::size_t>();
    file.training.hazard = t.at("hazard").get<std::size_t>();
    file.training.normal = t.at("normal").get<std::size_t>();
    file.training.working_samples = t.at("working_samples").get<std::size_t>();
    file.training.seed = t.at("seed").get<std::uint64_t>();
    file.training.trained_at = t.at("trained_at").get<std::string>();
  } catch (const json::exception& e) {
    corrupt(source_name, e.what());
  } catch (const Error& e) {
    corrupt(source_name, e.what());
  }

  const std::size_t raw = file.feature_names.size();
  const std::size_t working = m.feature_mask.kept_indices.size();
  require(raw > 0, source_name, "no feature names");
  require(m.normalization.mean.size() == raw && m.normalization.stddev.size() == raw, source_name,
          "normalization length differs from feature count");
  require(m.feature_mask.correlations.size() == raw, source_name,
          "correlation list length differs from feature count");
  for (std::size_t i = 0; i < working; ++i) {
    require(m.feature_mask.kept_indices[i] < raw &&
                (i == 0 || m.feature_mask.kept_indices[i] > m.feature_mask.kept_indices[i - 1]),
            source_name, "kept_indices must be increasing and in range");
  }
  require(!m.support_vectors.empty(), source_name, "no support vectors");
  require(m.support_vectors.size() == m.dual_coefficients.size() &&
              m.support_vectors.size() == m.support_indices.size(),
          source_name, "support vector / coefficient counts differ");
  for (const auto& sv : m.support_vectors) {
    require(sv.size() == working, source_name, "support vector width differs from kept features");
  }
  if (m.weight_vector) {
    require(m.weight_vector->size() == working, source_name, "weight vector width differs");
  }
  require(std::isfinite(m.c) && m.c > 0.0, source_name, "C must be positive");
  try {
    m.kernel.validate();
  } catch (const Error& e) {
    corrupt(source_name, e.what());
  }
  return file;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, path + ": cannot open for reading");
  }
  return load_model(in, path);
}

} // namespace hazsvm::cli
