#include <doctest.h>

#include <cmath>
#include <vector>

#include "lhv/cloud.hpp"
#include "lhv/eval.hpp"
#include "lhv/reference.hpp"
#include "lhv/rng.hpp"
#include "lhv/sh_basis.hpp"

using namespace lhv;

TEST_CASE("outcome distributions normalize under both rules") {
  const HiddenStateCloud cloud = init_cloud(3, 3, 256, Precision::F64, 41, 0.9);
  const ShBasis basis(3);
  const CounterRng rng(42, RngStream::Generic);
  for (int t = 0; t < 10; ++t) {
    double dirs[9];
    for (int j = 0; j < 3; ++j) {
      const auto v = rng.sphere(static_cast<uint64_t>(t), static_cast<uint64_t>(j));
      for (int k = 0; k < 3; ++k) dirs[3 * j + k] = v[k];
    }
    for (const Rule rule : {Rule::Soft, Rule::Hard}) {
      double total = 0.0;
      for (int mask = 0; mask < 8; ++mask) {
        std::vector<int> outcomes(3);
        for (int j = 0; j < 3; ++j) outcomes[static_cast<size_t>(j)] = (mask >> j) & 1 ? 1 : -1;
        const double p = lhv_outcome_prob(cloud, basis, dirs, outcomes, rule);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        total += p;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("flipping an outcome equals negating its direction, bitwise") {
  const HiddenStateCloud cloud = init_cloud(5, 2, 128, Precision::F64, 43, 0.8);
  const ShBasis basis(5);
  const CounterRng rng(44, RngStream::Generic);
  for (int t = 0; t < 20; ++t) {
    double dirs[6];
    for (int j = 0; j < 2; ++j) {
      const auto v = rng.sphere(static_cast<uint64_t>(t), static_cast<uint64_t>(j));
      for (int k = 0; k < 3; ++k) dirs[3 * j + k] = v[k];
    }
    double flipped[6] = {dirs[0], dirs[1], dirs[2], -dirs[3], -dirs[4], -dirs[5]};
    for (const Rule rule : {Rule::Soft, Rule::Hard}) {
      CHECK(lhv_outcome_prob(cloud, basis, dirs, {1, -1}, rule) ==
            lhv_outcome_prob(cloud, basis, flipped, {1, 1}, rule));
      CHECK(lhv_outcome_prob(cloud, basis, dirs, {-1, -1}, rule) ==
            lhv_outcome_prob(cloud, basis, flipped, {-1, 1}, rule));
    }
  }
}

TEST_CASE("all-up helper equals the explicit outcome vector and the reference") {
  const HiddenStateCloud cloud = init_cloud(3, 2, 200, Precision::F64, 45, 0.7);
  const ShBasis basis(3);
  const CounterRng rng(46, RngStream::Generic);
  for (int t = 0; t < 10; ++t) {
    double dirs[6];
    for (int j = 0; j < 2; ++j) {
      const auto v = rng.sphere(static_cast<uint64_t>(t), static_cast<uint64_t>(j));
      for (int k = 0; k < 3; ++k) dirs[3 * j + k] = v[k];
    }
    const double a = lhv_prob_all_up(cloud, basis, dirs);
    CHECK(a == lhv_outcome_prob(cloud, basis, dirs, {1, 1}, Rule::Soft));
    CHECK(a == doctest::Approx(ref::prob_all_up(cloud, basis, dirs)).epsilon(1e-12));
  }
}

TEST_CASE("marginal over one site matches the outcome sum") {
  const HiddenStateCloud cloud = init_cloud(1, 2, 300, Precision::F64, 47, 1.1);
  const ShBasis basis(1);
  const CounterRng rng(48, RngStream::Generic);
  for (int t = 0; t < 10; ++t) {
    double dirs[6];
    for (int j = 0; j < 2; ++j) {
      const auto v = rng.sphere(static_cast<uint64_t>(t), static_cast<uint64_t>(j));
      for (int k = 0; k < 3; ++k) dirs[3 * j + k] = v[k];
    }
    const double site0_up = lhv_marginal_prob(cloud, basis, {0}, dirs, {1});
    const double joint = lhv_outcome_prob(cloud, basis, dirs, {1, 1}, Rule::Soft) +
                         lhv_outcome_prob(cloud, basis, dirs, {1, -1}, Rule::Soft);
    CHECK(site0_up == doctest::Approx(joint).epsilon(1e-12));

    // Measuring the second site alone reads its own direction slice.
    const double site1_up = lhv_marginal_prob(cloud, basis, {1}, dirs + 3, {1});
    const double joint1 = lhv_outcome_prob(cloud, basis, dirs, {1, 1}, Rule::Soft) +
                          lhv_outcome_prob(cloud, basis, dirs, {-1, 1}, Rule::Soft);
    CHECK(site1_up == doctest::Approx(joint1).epsilon(1e-12));
  }
}

TEST_CASE("hard rule treats an exactly orthogonal hidden vector as a coin") {
  // One hidden sample along +x, measured along +z: the degree-1 feature dot
  // product is exactly zero, so the hard response must give 1/2.
  HiddenStateCloud cloud = init_cloud(1, 1, 1, Precision::F64, 1, 1.0);
  cloud.set_value(0, 0, 0, 0.0);  // y
  cloud.set_value(0, 0, 1, 0.0);  // z
  cloud.set_value(0, 0, 2, 5.0);  // x
  const ShBasis basis(1);
  const double dirs[3] = {0.0, 0.0, 1.0};
  CHECK(lhv_prob_all_up(cloud, basis, dirs, Rule::Hard) == 0.5);
  const double along[3] = {1.0, 0.0, 0.0};
  CHECK(lhv_prob_all_up(cloud, basis, along, Rule::Hard) == 1.0);
  const double anti[3] = {-1.0, 0.0, 0.0};
  CHECK(lhv_prob_all_up(cloud, basis, anti, Rule::Hard) == 0.0);
}
