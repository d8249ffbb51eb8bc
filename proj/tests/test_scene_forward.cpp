// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The clns Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstring>
#include <limits>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "clns/scene_forward.hpp"
#include "oracles.hpp"

using namespace clns;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.n_theta = 4;
  c.n_freq = 2;
  c.grid = {5, 4, 3};
  return c;
}

bool bit_identical(const CMatrix& a, const CMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(Complex) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST(ScenarioConfig, DefaultsMatchReferenceSetup) {
  const ScenarioConfig c;
  EXPECT_EQ(c.n_theta, 31u);
  EXPECT_EQ(c.n_freq, 3u);
  EXPECT_EQ(c.n_measurements(), 93u);
  EXPECT_EQ(c.n_pixels(), 25000u);
  EXPECT_DOUBLE_EQ(c.roi_offset_z0, 195.0);
  EXPECT_DOUBLE_EQ(c.roi_extent[0], 36.0);
  EXPECT_DOUBLE_EQ(c.roi_extent[1], 36.0);
  EXPECT_DOUBLE_EQ(c.roi_extent[2], 7.5);
  EXPECT_DOUBLE_EQ(c.voxel_size_l, 1.5);
  EXPECT_DOUBLE_EQ(c.center_freq_hz, 60e9);
  EXPECT_DOUBLE_EQ(c.bandwidth_hz, 6e9);
  EXPECT_NEAR(c.center_wavelength(), 5e-3, 1e-5);
  EXPECT_TRUE(c.violations().empty());
}

TEST(ScenarioConfig, FrequenciesSpanTheBand) {
  ScenarioConfig c;
  const auto f = c.frequencies();
  ASSERT_EQ(f.size(), 3u);
  EXPECT_DOUBLE_EQ(f[0], 57e9);
  EXPECT_DOUBLE_EQ(f[1], 60e9);
  EXPECT_DOUBLE_EQ(f[2], 63e9);
  c.n_freq = 1;
  EXPECT_EQ(c.frequencies(), std::vector<double>{60e9});
}

TEST(ScenarioConfig, ReportsEveryViolation) {
  ScenarioConfig c;
  c.n_theta = 0;
  c.grid.ny = 0;
  c.roi_extent[2] = -1.0;
  c.snr_db = std::numeric_limits<double>::quiet_NaN();
  const auto v = c.violations();
  EXPECT_EQ(v.size(), 4u);
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(BuildPhantom, EmptyTargetListGivesZeroScene) {
  const Scene s = build_phantom(small_config(), {});
  EXPECT_EQ(s.reflectivity.size(), 60);
  EXPECT_TRUE(s.reflectivity.isZero(0.0));
  EXPECT_TRUE(s.support().empty());
}

TEST(BuildPhantom, SingleVoxelAtOrigin) {
  const Scene s = build_phantom(small_config(), {Target{{{0, 0, 0}, {1, 1, 1}}, {1.0, 0.0}}});
  CVector e0 = CVector::Zero(60);
  e0[0] = 1.0;
  EXPECT_EQ(s.reflectivity, e0);
  EXPECT_EQ(s.support(), std::vector<std::size_t>{0});
}

TEST(BuildPhantom, FourDisjointBoxesMatchEnumeration) {
  ScenarioConfig c;
  c.grid = {10, 10, 3};
  const std::vector<Target> targets = {
      {{{1, 1, 1}, {2, 2, 1}}, 1.0}, {{{6, 1, 1}, {2, 2, 1}}, 1.0},
      {{{1, 6, 0}, {2, 2, 1}}, 1.0}, {{{6, 6, 2}, {2, 2, 1}}, 1.0}};
  const Scene s = build_phantom(c, targets);

  // Brute force: test every voxel against every box.
  std::set<std::size_t> members;
  for (std::size_t z = 0; z < 3; ++z)
    for (std::size_t y = 0; y < 10; ++y)
      for (std::size_t x = 0; x < 10; ++x)
        for (const auto& t : targets) {
          const auto& o = t.box.origin;
          const auto& sz = t.box.size;
          if (x >= o[0] && x < o[0] + sz[0] && y >= o[1] && y < o[1] + sz[1] && z >= o[2] && z < o[2] + sz[2]) {
            members.insert(x + 10 * (y + 10 * z));
          }
        }
  EXPECT_EQ(members.size(), 16u);
  const auto support = s.support();
  EXPECT_EQ(std::set<std::size_t>(support.begin(), support.end()), members);
  EXPECT_DOUBLE_EQ(s.reflectivity.cwiseAbs().sum(), 16.0);
}

TEST(BuildPhantom, OverlappingBoxesSum) {
  const Scene s = build_phantom(small_config(), {Target{{{0, 0, 0}, {2, 1, 1}}, {1.0, 0.0}},
                                                 Target{{{1, 0, 0}, {2, 1, 1}}, {0.0, 2.0}}});
  EXPECT_EQ(s.reflectivity[0], Complex(1.0, 0.0));
  EXPECT_EQ(s.reflectivity[1], Complex(1.0, 2.0));
  EXPECT_EQ(s.reflectivity[2], Complex(0.0, 2.0));
}

TEST(BuildPhantom, BoxOutsideGridIsRangeError) {
  EXPECT_THROW(build_phantom(small_config(), {Target{{{4, 0, 0}, {2, 1, 1}}, 1.0}}), RangeError);
  EXPECT_THROW(build_phantom(small_config(), {Target{{{0, 0, 3}, {1, 1, 1}}, 1.0}}), RangeError);
  EXPECT_THROW(build_phantom(small_config(), {Target{{{0, 0, 0}, {0, 1, 1}}, 1.0}}), RangeError);
}

TEST(SensingMatrix, ReferenceShape) {
  const SensingMatrix H = synthesize_sensing_matrix(ScenarioConfig{}, 2);
  EXPECT_EQ(H.rows(), 93u);
  EXPECT_EQ(H.cols(), 25000u);
  EXPECT_TRUE(H.entries.allFinite());
}

TEST(SensingMatrix, SingleElementMagnitude) {
  ScenarioConfig c;
  c.n_theta = 1;
  c.n_freq = 1;
  c.grid = {1, 1, 1};
  const SensingMatrix H = synthesize_sensing_matrix(c);
  ASSERT_EQ(H.rows(), 1u);
  ASSERT_EQ(H.cols(), 1u);
  const double d0 = c.roi_offset_z0 * c.center_wavelength();
  EXPECT_NEAR(std::abs(H.entries(0, 0)), 1.0 / (d0 * d0), 1e-14);
}

TEST(SensingMatrix, RowsAreRotationMajor) {
  const SensingMatrix H = synthesize_sensing_matrix(small_config());
  ASSERT_EQ(H.row_meta.size(), 8u);
  for (std::size_t row = 0; row < 8; ++row) {
    EXPECT_EQ(H.row_meta[row].rotation_index, row / 2);
    EXPECT_EQ(H.row_meta[row].frequency_index, row % 2);
  }
  for (Eigen::Index r = 0; r < H.entries.rows(); ++r) EXPECT_GT(H.entries.row(r).norm(), 0.0);
}

TEST(SensingMatrix, DeterministicAndSeedDependent) {
  ScenarioConfig c = small_config();
  const SensingMatrix a = synthesize_sensing_matrix(c, 1);
  const SensingMatrix b = synthesize_sensing_matrix(c, 4);
  EXPECT_TRUE(bit_identical(a.entries, b.entries));
  c.rng_seed = 2;
  const SensingMatrix other = synthesize_sensing_matrix(c, 1);
  EXPECT_FALSE(bit_identical(a.entries, other.entries));
}

TEST(SensingMatrix, CodePhaseIsSharedAcrossFrequencies) {
  // The ratio of two frequency rows of one rotation removes the code phase,
  // so it must not depend on the seed.
  ScenarioConfig c = small_config();
  const SensingMatrix a = synthesize_sensing_matrix(c);
  c.rng_seed = 99;
  const SensingMatrix b = synthesize_sensing_matrix(c);
  for (Eigen::Index p = 0; p < a.entries.cols(); ++p) {
    const Complex ra = a.entries(1, p) / a.entries(0, p);
    const Complex rb = b.entries(1, p) / b.entries(0, p);
    EXPECT_NEAR(std::abs(ra - rb), 0.0, 1e-9);
  }
}

TEST(SensingMatrix, CodePhaseRange) {
  for (std::size_t p = 0; p < 1000; ++p) {
    const double phi = code_phase(7, p % 5, p);
    EXPECT_GE(phi, 0.0);
    EXPECT_LT(phi, 2.0 * std::numbers::pi);
  }
}

TEST(ForwardMeasure, NoiselessIsExact) {
  const SensingMatrix H = synthesize_sensing_matrix(small_config());
  const Scene s = build_phantom(small_config(), {Target{{{1, 1, 1}, {2, 2, 1}}, {0.5, -1.0}}});
  const Measurement m = forward_measure(H, s, std::numeric_limits<double>::infinity(), 3);
  EXPECT_EQ(m.g, CVector(H.entries * s.reflectivity));
  EXPECT_EQ(m.noise_power, 0.0);
  EXPECT_TRUE(std::isinf(m.realized_snr_db));
}

TEST(ForwardMeasure, ZeroSignalEmitsNoNoise) {
  const SensingMatrix H = synthesize_sensing_matrix(small_config());
  const Scene s = build_phantom(small_config(), {});
  const Measurement m = forward_measure(H, s, 10.0, 3);
  EXPECT_TRUE(m.g.isZero(0.0));
  EXPECT_EQ(m.noise_power, 0.0);
  EXPECT_TRUE(std::isinf(m.realized_snr_db));
}

TEST(ForwardMeasure, IdentityForward) {
  const CMatrix I = CMatrix::Identity(2, 2);
  CVector u(2);
  u << Complex(1.0, 0.0), Complex(0.0, 2.0);
  const Measurement m = forward_measure(I, u, std::numeric_limits<double>::infinity(), 0);
  EXPECT_EQ(m.g, u);
}

TEST(ForwardMeasure, ShapeMismatch) {
  EXPECT_THROW(forward_measure(CMatrix::Identity(2, 3), CVector::Zero(2), 10.0, 0), ShapeError);
}

TEST(ForwardMeasure, Linearity) {
  std::mt19937_64 rng(11);
  const CMatrix H = oracle::random_matrix(rng, 7, 13);
  const CVector u1 = oracle::random_vector(rng, 13);
  const CVector u2 = oracle::random_vector(rng, 13);
  const Complex alpha(0.3, -1.2), beta(-2.0, 0.5);
  const double inf = std::numeric_limits<double>::infinity();
  const CVector lhs = forward_measure(H, CVector(alpha * u1 + beta * u2), inf, 0).g;
  const CVector rhs = alpha * forward_measure(H, u1, inf, 0).g + beta * forward_measure(H, u2, inf, 0).g;
  EXPECT_LE(oracle::rel_err(lhs, rhs), 1e-12);
}

TEST(ForwardMeasure, RealizedSnrAveragesToTarget) {
  const ScenarioConfig c = small_config();
  const SensingMatrix H = synthesize_sensing_matrix(c);
  const Scene s = build_phantom(c, {Target{{{0, 0, 0}, {5, 4, 1}}, 1.0}});
  double sum = 0.0;
  const int draws = 200;
  for (int i = 0; i < draws; ++i) {
    const Measurement m = forward_measure(H, s, 20.0, 1000 + i);
    EXPECT_GT(m.noise_power, 0.0);
    sum += m.realized_snr_db;
  }
  EXPECT_NEAR(sum / draws, 20.0, 1.0);
}

TEST(ForwardMeasure, DeterministicGivenSeed) {
  const SensingMatrix H = synthesize_sensing_matrix(small_config());
  const Scene s = build_phantom(small_config(), {Target{{{0, 0, 0}, {2, 2, 2}}, 1.0}});
  const Measurement a = forward_measure(H, s, 15.0, 42);
  const Measurement b = forward_measure(H, s, 15.0, 42);
  const Measurement c = forward_measure(H, s, 15.0, 43);
  EXPECT_EQ(a.g, b.g);
  EXPECT_NE(a.g, c.g);
}
