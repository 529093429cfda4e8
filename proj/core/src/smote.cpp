#include "hazsvm/smote.hpp"

#include "hazsvm/error.hpp"
#include "hazsvm/kernel.hpp"
#include "hazsvm/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hazsvm {

void SmoteConfig::validate() const {
  if (k_neighbors < 1) {
    throw Error(ErrorKind::argument, "SMOTE k_neighbors must be >= 1");
  }
  if (!(target_ratio > 0.0 && target_ratio <= 1.0)) {
    throw Error(ErrorKind::argument, "SMOTE target_ratio must lie in (0, 1]");
  }
}

Label minority_label(const Dataset& data) {
  return data.count(Label::hazard) <= data.count(Label::normal) ? Label::hazard : Label::normal;
}

namespace {

std::vector<std::size_t> members(const Dataset& data, Label label) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.samples[i].label == label) {
      idx.push_back(i);
    }
  }
  return idx;
}

std::vector<std::size_t> nearest(const Dataset& data, std::span<const std::size_t> pool,
                                 std::size_t index, int k) {
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(pool.size());
  const auto& query = data.samples[index].features;
  for (auto j : pool) {
    if (j != index) {
      ranked.emplace_back(squared_distance(query, data.samples[j].features), j);
    }
  }
  const auto keep = std::min(ranked.size(), static_cast<std::size_t>(k));
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end());
  std::vector<std::size_t> out;
  out.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    out.push_back(ranked[r].second);
  }
  return out;
}

} // namespace

std::vector<std::size_t> minority_neighbors(const Dataset& data, std::size_t index, int k) {
  if (index >= data.size()) {
    throw Error(ErrorKind::argument, "sample index out of range");
  }
  if (k < 1) {
    throw Error(ErrorKind::argument, "k must be >= 1");
  }
  const Label minority = minority_label(data);
  if (data.samples[index].label != minority) {
    throw Error(ErrorKind::argument, "sample " + std::to_string(index) + " is not in the minority class");
  }
  const auto pool = members(data, minority);
  if (pool.size() < 2) {
    throw Error(ErrorKind::insufficient_minority, "minority class has a single sample");
  }
  return nearest(data, pool, index, k);
}

FeatureVector interpolate(std::span<const double> base, std::span<const double> neighbor,
                          double lambda) {
  if (base.size() != neighbor.size()) {
    throw Error(ErrorKind::shape, "interpolate: vector lengths differ");
  }
  FeatureVector out(base.size());
  for (std::size_t d = 0; d < base.size(); ++d) {
    out[d] = base[d] + lambda * (neighbor[d] - base[d]);
  }
  return out;
}

std::size_t synthetic_count(std::size_t majority, std::size_t minority, double target_ratio) {
  // Guard against products like 0.3 * 10 = 3.0000000000000004.
  const double target = target_ratio * static_cast<double>(majority);
  const auto wanted = static_cast<std::size_t>(std::ceil(target - 1e-9 * std::max(1.0, target)));
  return wanted > minority ? wanted - minority : 0;
}

Dataset smote_balance(const Dataset& data, const SmoteConfig& config) {
  config.validate();
  require_both_classes(data, "SMOTE");
  const Label minority = minority_label(data);
  const auto pool = members(data, minority);
  if (pool.size() < 2) {
    throw Error(ErrorKind::insufficient_minority,
                "SMOTE needs at least 2 minority samples, got " + std::to_string(pool.size()));
  }
  const std::size_t majority_size = data.size() - pool.size();
  const std::size_t needed = synthetic_count(majority_size, pool.size(), config.target_ratio);

  Dataset out = data;
  if (needed == 0) {
    return out;
  }
  out.samples.reserve(data.size() + needed);

  std::vector<std::vector<std::size_t>> neighbors(pool.size());
  for (std::size_t p = 0; p < pool.size(); ++p) {
    neighbors[p] = nearest(data, pool, pool[p], config.k_neighbors);
  }

  Rng rng(derive_seed(config.seed, 0x534d4f5445ULL));
  std::uniform_int_distribution<std::size_t> pick_base(0, pool.size() - 1);
  std::uniform_real_distribution<double> pick_lambda(0.0, 1.0);
  for (std::size_t s = 0; s < needed; ++s) {
    const std::size_t p = pick_base(rng);
    const auto& nbrs = neighbors[p];
    std::uniform_int_distribution<std::size_t> pick_nbr(0, nbrs.size() - 1);
    const std::size_t n = nbrs[pick_nbr(rng)];
    const double lambda = pick_lambda(rng);
    out.samples.push_back(
        {interpolate(data.samples[pool[p]].features, data.samples[n].features, lambda), minority});
  }
  return out;
}

} // namespace hazsvm
