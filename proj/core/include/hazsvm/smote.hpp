#pragma once

#include "hazsvm/data.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hazsvm {

struct SmoteConfig {
  int k_neighbors = 5;
  double target_ratio = 1.0; // minority / majority after balancing
  std::uint64_t seed = 0;

  void validate() const;
};

/// The class with fewer samples; hazard when the counts are equal.
Label minority_label(const Dataset& data);

/// Indices of the k nearest other minority samples to data.samples[index]
/// (Euclidean), nearest first, ties to the lower index. Returns every other
/// minority sample when fewer than k exist.
std::vector<std::size_t> minority_neighbors(const Dataset& data, std::size_t index, int k);

/// base + lambda * (neighbor - base).
FeatureVector interpolate(std::span<const double> base, std::span<const double> neighbor,
                          double lambda);

/// Number of synthetic rows smote_balance will append.
std::size_t synthetic_count(std::size_t majority, std::size_t minority, double target_ratio);

/// Appends synthetic minority rows until minority = ceil(target_ratio *
/// majority). Each synthetic interpolates a uniformly drawn minority sample
/// toward one of its k minority neighbors with lambda ~ U[0, 1]. Original
/// rows are kept verbatim and first.
Dataset smote_balance(const Dataset& data, const SmoteConfig& config);

} // namespace hazsvm
