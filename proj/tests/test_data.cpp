#include "hazsvm/data.hpp"
#include "hazsvm/error.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace hazsvm;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected hazsvm::Error");
  return ErrorKind::io;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return load_labeled_csv(in, CsvOptions{"mem.csv"});
}

Dataset single_column(std::vector<double> values, std::vector<int> labels) {
  Dataset d;
  d.feature_names = {"f"};
  for (std::size_t i = 0; i < values.size(); ++i) {
    d.samples.push_back({{values[i]}, labels[i] > 0 ? Label::hazard : Label::normal});
  }
  return d;
}

Dataset labeled(std::size_t positives, std::size_t negatives) {
  Dataset d;
  d.feature_names = {"id"};
  for (std::size_t i = 0; i < positives + negatives; ++i) {
    d.samples.push_back({{static_cast<double>(i)}, i < positives ? Label::hazard : Label::normal});
  }
  return d;
}

} // namespace

TEST_CASE("load_labeled_csv transcribes rows and labels") {
  const auto d = parse("t,h,label\n1.0,2.0,1\n3.0,4.0,-1");
  CHECK(d.feature_names == std::vector<std::string>{"t", "h"});
  REQUIRE(d.size() == 2);
  CHECK(d.samples[0].features == FeatureVector{1.0, 2.0});
  CHECK(d.samples[0].label == Label::hazard);
  CHECK(d.samples[1].label == Label::normal);
}

TEST_CASE("hazard/normal aliases equal numeric labels") {
  CHECK(parse("t,h,label\n1.0,2.0,hazard\n3.0,4.0,normal\n") ==
        parse("t,h,label\n1.0,2.0,1\n3.0,4.0,-1\n"));
}

TEST_CASE("load_labeled_csv error paths") {
  CHECK(kind_of([] { parse("t,h,label\n1.0,x,1\n"); }) == ErrorKind::parse);
  const auto msg = message_of([] { parse("t,h,label\n1.0,x,1\n"); });
  CHECK(msg.find(":2") != std::string::npos);
  CHECK(msg.find("'h'") != std::string::npos);

  CHECK(kind_of([] { parse("t,h,label\n1.0,2.0\n"); }) == ErrorKind::parse);
  CHECK(kind_of([] { parse("t,h,label\n1.0,2.0,maybe\n"); }) == ErrorKind::label);
  CHECK(kind_of([] { parse(""); }) == ErrorKind::empty_input);
  CHECK(kind_of([] { parse("t,h,target\n1,2,1\n"); }) == ErrorKind::parse);
}

TEST_CASE("decimal parsing ignores the global locale and round-trips") {
  Dataset d = testing::two_gaussians(20, 0.3, 2.0, 3, 7);
  std::ostringstream out;
  write_labeled_csv(out, d);
  CHECK(parse(out.str()) == d);
}

TEST_CASE("fit_normalizer uses the population stddev") {
  const auto stats = fit_normalizer(single_column({0, 10, 20}, {1, -1, 1}));
  CHECK(stats.mean[0] == doctest::Approx(10.0));
  CHECK(stats.stddev[0] == doctest::Approx(8.16496580927726).epsilon(1e-12));

  const auto constant = fit_normalizer(single_column({5, 5, 5}, {1, -1, 1}));
  CHECK(constant.mean[0] == 5.0);
  CHECK(constant.stddev[0] == 0.0);

  Dataset twin;
  twin.feature_names = {"a", "b"};
  for (double v : {1.0, 4.0, 9.0}) {
    twin.samples.push_back({{v, v}, Label::normal});
  }
  const auto s = fit_normalizer(twin);
  CHECK(s.mean[0] == s.mean[1]);
  CHECK(s.stddev[0] == s.stddev[1]);

  CHECK(kind_of([] { fit_normalizer(Dataset{{"a"}, {}}); }) == ErrorKind::empty_input);
}

TEST_CASE("normalize produces z-scores and zeros for constant columns") {
  const auto d = single_column({0, 10, 20}, {1, -1, 1});
  const auto z = normalize(fit_normalizer(d), d);
  CHECK(z.samples[0].features[0] == doctest::Approx(-1.224744871391589).epsilon(1e-12));
  CHECK(z.samples[1].features[0] == doctest::Approx(0.0));
  CHECK(z.samples[2].features[0] == doctest::Approx(1.224744871391589).epsilon(1e-12));

  const auto c = single_column({5, 5, 5}, {1, -1, 1});
  for (const auto& s : normalize(fit_normalizer(c), c).samples) {
    CHECK(s.features[0] == 0.0);
  }
  CHECK(kind_of([&] { normalize(NormalizationStats::identity(2), d); }) == ErrorKind::shape);
}

TEST_CASE("property: re-fitting normalized data gives mean 0 and stddev 0 or 1") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  std::uniform_int_distribution<int> size(2, 40);
  for (int trial = 0; trial < 200; ++trial) {
    Dataset d;
    d.feature_names = {"a", "b", "c"};
    const int n = size(rng);
    for (int i = 0; i < n; ++i) {
      // third column constant on purpose
      d.samples.push_back({{value(rng), value(rng) * 1e3, 7.5}, i % 2 ? Label::hazard : Label::normal});
    }
    const auto refit = fit_normalizer(normalize(fit_normalizer(d), d));
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(refit.mean[j]) <= 1e-12);
      const bool zero = refit.stddev[j] == 0.0;
      const bool unit = std::abs(refit.stddev[j] - 1.0) <= 1e-12;
      CHECK((zero || unit));
    }
  }
}

TEST_CASE("select_features_by_correlation") {
  SUBCASE("feature equal to the label has r = 1") {
    const auto d = single_column({1, -1, 1, -1}, {1, -1, 1, -1});
    const auto mask = select_features_by_correlation(d, 1.0);
    REQUIRE(mask.correlations[0].has_value());
    CHECK(*mask.correlations[0] == doctest::Approx(1.0));
    CHECK(mask.kept_indices == std::vector<std::size_t>{0});
  }
  SUBCASE("constant feature is undefined and dropped") {
    const auto d = single_column({3, 3, 3, 3}, {1, -1, 1, -1});
    const auto mask = select_features_by_correlation(d, 0.0);
    CHECK_FALSE(mask.correlations[0].has_value());
    CHECK(mask.kept_indices.empty());
  }
  SUBCASE("hand Pearson value") {
    // mean x = 2.5, mean y = 0; cov = (1.5 + .5 + .5 + 1.5) = 4;
    // sxx = 5, syy = 4  ->  r = 4 / sqrt(20) = 0.894427191
    const auto d = single_column({1, 2, 3, 4}, {-1, -1, 1, 1});
    const auto keep = select_features_by_correlation(d, 0.5);
    CHECK(*keep.correlations[0] == doctest::Approx(0.8944271909999159).epsilon(1e-12));
    CHECK(keep.kept_indices.size() == 1);
    CHECK(select_features_by_correlation(d, 0.9).kept_indices.empty());
  }
  SUBCASE("single class is degenerate") {
    const auto d = single_column({1, 2, 3}, {1, 1, 1});
    CHECK(kind_of([&] { select_features_by_correlation(d, 0.1); }) == ErrorKind::degenerate_labels);
  }
  SUBCASE("min_abs_r = 0 keeps every finite-variance feature") {
    auto d = testing::two_gaussians(30, 0.4, 1.0, 4, 3);
    for (auto& s : d.samples) {
      s.features[2] = 1.0;
    }
    const auto mask = select_features_by_correlation(d, 0.0);
    CHECK(mask.kept_indices == std::vector<std::size_t>{0, 1, 3});
  }
}

TEST_CASE("stratified_split proportions and determinism") {
  const auto d = labeled(2, 8);
  const auto half = stratified_split(d, 0.5, 1);
  CHECK(half.test.count(Label::hazard) == 1);
  CHECK(half.test.count(Label::normal) == 4);

  const auto a = stratified_split(d, 0.3, 9);
  CHECK(a.test.count(Label::hazard) == 1); // round(0.6)
  CHECK(a.test.count(Label::normal) == 2); // round(2.4)
  CHECK(a.train.size() + a.test.size() == d.size());

  const auto b = stratified_split(d, 0.3, 9);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);

  const auto idx = stratified_split_indices(d, 0.3, 9);
  std::vector<std::size_t> all = idx.train;
  all.insert(all.end(), idx.test.begin(), idx.test.end());
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  CHECK(all.size() == d.size());

  CHECK(kind_of([&] { stratified_split(d, 0.0, 1); }) == ErrorKind::argument);
  CHECK(kind_of([&] { stratified_split(d, 1.0, 1); }) == ErrorKind::argument);

  // A singleton class stays on the training side.
  const auto lone = stratified_split(labeled(1, 9), 0.5, 2);
  CHECK(lone.train.count(Label::hazard) == 1);
}

TEST_CASE("stratified_kfold") {
  const auto d = labeled(2, 8);
  for (const auto& fold : stratified_kfold(d, 2, 5)) {
    CHECK(fold.validation.count(Label::hazard) == 1);
    CHECK(fold.train.size() + fold.validation.size() == d.size());
  }
  CHECK(kind_of([&] { stratified_kfold(d, 3, 5); }) == ErrorKind::stratification);
  CHECK(kind_of([&] { stratified_kfold(d, 1, 5); }) == ErrorKind::argument);

  const auto folds = stratified_kfold_indices(labeled(20, 80), 5, 17);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    std::size_t pos = 0;
    for (auto i : f) {
      CHECK(seen.insert(i).second);
      pos += i < 20 ? 1 : 0;
    }
    CHECK(pos == 4);
  }
  CHECK(seen.size() == 100);
  CHECK(folds == stratified_kfold_indices(labeled(20, 80), 5, 17));
}

TEST_CASE("subset and validate") {
  const auto d = labeled(3, 3);
  const std::vector<std::size_t> rows{4, 0};
  const auto s = subset(d, rows);
  CHECK(s.samples[0] == d.samples[4]);
  CHECK(s.samples[1] == d.samples[0]);

  Dataset dup{{"a", "a"}, {}};
  CHECK(kind_of([&] { dup.validate(); }) == ErrorKind::argument);
  Dataset ragged{{"a"}, {{{1.0, 2.0}, Label::hazard}}};
  CHECK(kind_of([&] { ragged.validate(); }) == ErrorKind::shape);
}
