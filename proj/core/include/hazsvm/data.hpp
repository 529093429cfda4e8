#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hazsvm {

using FeatureVector = std::vector<double>;

/// Hazard label. The numeric values are the ±1 targets used by the SVM.
enum class Label : int { normal = -1, hazard = 1 };

constexpr double to_real(Label label) noexcept { return static_cast<double>(label); }
constexpr Label opposite(Label label) noexcept {
  return label == Label::hazard ? Label::normal : Label::hazard;
}

struct LabeledSample {
  FeatureVector features;
  Label label = Label::normal;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<LabeledSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t feature_count() const noexcept { return feature_names.size(); }
  bool empty() const noexcept { return samples.empty(); }
  std::size_t count(Label label) const noexcept;

  /// Throws shape/argument errors when the structural invariants are broken
  /// (ragged rows, duplicate or empty names, non-finite values).
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Rows of `data` at `indices`, in the given order.
Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

/// Throws degenerate_labels unless both classes are present.
void require_both_classes(const Dataset& data, std::string_view context);

// ---------------------------------------------------------------------------
// CSV ingestion

struct CsvOptions {
  std::string source_name = "<input>";
  char delimiter = ',';
};

/// Labeled dataset: header row, last column "label" with tokens 1/-1 or
/// hazard/normal, every other cell numeric.
Dataset load_labeled_csv(std::istream& source, const CsvOptions& options = {});
Dataset load_labeled_csv_file(const std::string& path);

/// Writes the format read by load_labeled_csv, numbers in shortest
/// round-trip form, labels as 1/-1.
void write_labeled_csv(std::ostream& out, const Dataset& data);

struct JoinOptions {
  double window_secs = 3600.0;
  double radius_km = 50.0;
  std::string observations_name = "<observations>";
  std::string reports_name = "<reports>";
};

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// Seconds since the Unix epoch for an ISO-8601 timestamp such as
/// 2021-06-01T12:00Z, 2021-06-01T12:00:00.5Z or 2021-06-01 12:00:00+02:00.
/// No zone designator means UTC.
std::optional<double> parse_timestamp(std::string_view text);

/// Output feature order of label_from_reports.
const std::vector<std::string>& observation_feature_names();

/// Joins weather observations against storm reports. An observation is
/// hazardous iff some report is within window_secs in time and radius_km
/// in great-circle distance. Wind direction becomes (sin, cos).
Dataset label_from_reports(std::istream& observations, std::istream& reports,
                           const JoinOptions& options = {});

// ---------------------------------------------------------------------------
// Normalization

struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> stddev; // population (divide by n)

  std::size_t feature_count() const noexcept { return mean.size(); }
  /// z-score of one raw row; zero-variance features map to 0.
  FeatureVector apply(std::span<const double> raw) const;
  /// mean 0 / stddev 1 for every feature.
  static NormalizationStats identity(std::size_t feature_count);

  friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

NormalizationStats fit_normalizer(const Dataset& data);
Dataset normalize(const NormalizationStats& stats, const Dataset& data);

// ---------------------------------------------------------------------------
// Correlation feature selection

struct FeatureMask {
  std::vector<std::size_t> kept_indices;
  /// Pearson r against the ±1 label per original column; nullopt when the
  /// column has zero variance.
  std::vector<std::optional<double>> correlations;

  std::size_t original_count() const noexcept { return correlations.size(); }
  FeatureVector apply(std::span<const double> row) const;
  /// Keeps every one of `feature_count` columns.
  static FeatureMask all(std::size_t feature_count);

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

inline constexpr double kDefaultMinAbsCorrelation = 0.1;

FeatureMask select_features_by_correlation(const Dataset& data, double min_abs_r);
Dataset apply_mask(const FeatureMask& mask, const Dataset& data);

// ---------------------------------------------------------------------------
// Stratified partitions

struct TrainTest {
  Dataset train;
  Dataset test;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per class: seeded shuffle, then round(count * test_fraction) rows go to
/// the test side, capped at count - 1. Both sides keep file order.
SplitIndices stratified_split_indices(const Dataset& data, double test_fraction,
                                      std::uint64_t seed);
TrainTest stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed);

/// Validation indices (ascending) of each of the k folds. Each class is
/// shuffled and dealt round-robin, so per-class fold sizes differ by at most 1.
std::vector<std::vector<std::size_t>> stratified_kfold_indices(const Dataset& data, int k,
                                                               std::uint64_t seed);

struct Fold {
  Dataset train;
  Dataset validation;
};

std::vector<Fold> stratified_kfold(const Dataset& data, int k, std::uint64_t seed);

} // namespace hazsvm
