#pragma once

#include "hazsvm/svm.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hazsvm::cli {

inline constexpr int kModelFormatVersion = 1;

struct TrainingMetadata {
  std::size_t samples = 0;
  std::size_t hazard = 0;
  std::size_t normal = 0;
  std::size_t working_samples = 0; // after SMOTE
  std::uint64_t seed = 0;
  std::string trained_at; // ISO-8601 UTC
};

/// On-disk model: the trained SVM plus what is needed to check inputs.
struct ModelFile {
  TrainedSvm model;
  std::vector<std::string> feature_names; // raw columns, in order
  TrainingMetadata training;
};

/// JSON document, keys sorted, doubles in shortest round-trip form.
void save_model(std::ostream& out, const ModelFile& file);
void save_model_file(const std::string& path, const ModelFile& file);

/// Throws version errors for format_version != 1 and format errors for
/// anything malformed or inconsistent.
ModelFile load_model(std::istream& in, const std::string& source_name = "<model>");
ModelFile load_model_file(const std::string& path);

std::string utc_timestamp_now();

} // namespace hazsvm::cli
