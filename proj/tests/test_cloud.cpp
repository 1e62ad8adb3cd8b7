#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lhv/cloud.hpp"
#include "lhv/rng.hpp"
#include "lhv/stats.hpp"

using namespace lhv;

namespace {
std::string tmp_path(const std::string& tag) {
  return (std::filesystem::temp_directory_path() / ("lhv_test_" + tag + ".lhvc")).string();
}
}  // namespace

TEST_CASE("initialization is shaped, scaled, and deterministic") {
  const HiddenStateCloud c = init_cloud(3, 2, 4096, Precision::F32, 7, 0.5);
  CHECK(c.dim == 10);
  CHECK(c.f32.size() == 4096u * 2u * 10u);
  CHECK(c.f64.empty());
  CHECK(c.finite());

  double sum = 0.0, sum2 = 0.0;
  for (const float x : c.f32) {
    sum += x;
    sum2 += static_cast<double>(x) * x;
  }
  const double n = static_cast<double>(c.f32.size());
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::sqrt(sum2 / n) == doctest::Approx(0.5).epsilon(0.02));

  const HiddenStateCloud again = init_cloud(3, 2, 4096, Precision::F32, 7, 0.5);
  CHECK(c.f32 == again.f32);
  const HiddenStateCloud other = init_cloud(3, 2, 4096, Precision::F32, 8, 0.5);
  CHECK(c.f32 != other.f32);
}

TEST_CASE("value accessors address sample-spin-component order") {
  HiddenStateCloud c = init_cloud(1, 3, 10, Precision::F64, 1, 1.0);
  c.set_value(4, 2, 1, 42.0);
  CHECK(c.value(4, 2, 1) == 42.0);
  CHECK(c.f64[(4 * 3 + 2) * 3 + 1] == 42.0);
  CHECK(c.offset(4, 2) == (4 * 3 + 2) * 3u);
}

TEST_CASE("precision conversion preserves values") {
  const HiddenStateCloud c32 = init_cloud(1, 1, 100, Precision::F32, 3, 1.0);
  const HiddenStateCloud c64 = c32.to_precision(Precision::F64);
  REQUIRE(c64.f64.size() == c32.f32.size());
  for (size_t i = 0; i < c32.f32.size(); ++i) {
    CHECK(c64.f64[i] == static_cast<double>(c32.f32[i]));
  }
  const HiddenStateCloud back = c64.to_precision(Precision::F32);
  CHECK(back.f32 == c32.f32);
}

TEST_CASE("checkpoints round-trip bitwise and reject corruption") {
  for (const Precision prec : {Precision::F32, Precision::F64}) {
    const HiddenStateCloud c = init_cloud(5, 3, 257, prec, 11, 0.8);
    const std::string path = tmp_path("rt" + std::to_string(static_cast<int>(prec)));
    save_cloud(c, path);
    const HiddenStateCloud back = load_cloud(path);
    CHECK(back.precision == c.precision);
    CHECK(back.degree == c.degree);
    CHECK(back.spins == c.spins);
    CHECK(back.dim == c.dim);
    CHECK(back.samples == c.samples);
    CHECK(back.f32 == c.f32);
    CHECK(back.f64 == c.f64);
    std::filesystem::remove(path);
  }

  const std::string path = tmp_path("corrupt");
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a checkpoint at all";
  }
  CHECK_THROWS_AS(load_cloud(path), std::runtime_error);

  // Valid header, truncated payload.
  const HiddenStateCloud c = init_cloud(1, 1, 64, Precision::F32, 2, 1.0);
  save_cloud(c, path);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 32);
  CHECK_THROWS_AS(load_cloud(path), std::runtime_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_cloud(tmp_path("missing")), std::runtime_error);
}

TEST_CASE("single-spin sampler matches its density") {
  // For a pure +z state the hidden-vector z component has density 2z on
  // (0, 1], so the cdf is z^2.
  const CounterRng rng(5, RngStream::Probe);
  const Eigen::Vector3d up(0, 0, 1);
  std::vector<double> zs;
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const Eigen::Vector3d lam = sample_exact_single_spin(up, rng, static_cast<uint64_t>(i));
    CHECK(lam.norm() == doctest::Approx(1.0).epsilon(1e-12));
    zs.push_back(lam.z());
    mean += lam.z();
  }
  CHECK(mean / 20000 == doctest::Approx(2.0 / 3.0).epsilon(0.01));
  const auto ks = ks_test(zs, [](double z) { return z <= 0 ? 0.0 : std::min(1.0, z * z); });
  CHECK(ks.p_value > 0.01);

  // Fully mixed input: uniform direction, mean z vanishes.
  double mean0 = 0.0;
  for (int i = 0; i < 20000; ++i) {
    mean0 += sample_exact_single_spin(Eigen::Vector3d::Zero(), rng, 1u << 20, i).z();
  }
  CHECK(std::abs(mean0 / 20000) < 0.02);
}

TEST_CASE("separable clouds hold scaled unit hidden vectors") {
  const auto assign = product_assignment({Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0)});
  const HiddenStateCloud c = separable_cloud(2, 500, 9, 100.0, assign);
  CHECK(c.degree == 1);
  CHECK(c.precision == Precision::F64);
  for (uint64_t s = 0; s < 10; ++s) {
    for (int j = 0; j < 2; ++j) {
      double norm2 = 0.0;
      for (int k = 0; k < 3; ++k) norm2 += c.value(s, j, k) * c.value(s, j, k);
      CHECK(std::sqrt(norm2) == doctest::Approx(100.0).epsilon(1e-9));
    }
  }
  // Components are stored (y, z, x): spin 0 points +z, so component 1 leads.
  double zbar = 0.0;
  for (uint64_t s = 0; s < 500; ++s) zbar += c.value(s, 0, 1) / 100.0;
  CHECK(zbar / 500 == doctest::Approx(2.0 / 3.0).epsilon(0.1));

  CHECK_THROWS_AS(separable_cloud(3, 10, 1, 1.0, assign), std::invalid_argument);
}

TEST_CASE("mixture assignment selects components by weight") {
  const std::vector<Eigen::Vector3d> a = {Eigen::Vector3d(0, 0, 1)};
  const std::vector<Eigen::Vector3d> b = {Eigen::Vector3d(0, 0, -1)};
  const auto assign = mixture_assignment({0.8, 0.2}, {a, b}, 77);
  std::vector<Eigen::Vector3d> out(1);
  int first = 0;
  const int n = 10000;
  for (uint64_t s = 0; s < n; ++s) {
    assign(s, out);
    if (out[0].z() > 0) ++first;
  }
  CHECK(std::abs(first / static_cast<double>(n) - 0.8) < 0.02);
  // Selection is a pure function of the sample index.
  assign(3, out);
  const Eigen::Vector3d once = out[0];
  assign(3, out);
  CHECK(out[0] == once);
}
