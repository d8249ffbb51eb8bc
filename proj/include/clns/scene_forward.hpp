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

#pragma once

// Phantoms, the surrogate compressive-reflector sensing matrix and noisy
// measurements g = H u + w.

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "clns/types.hpp"

namespace clns {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Acquisition geometry and sampling. Lengths are in units of the center
/// wavelength. Defaults are the 93 x 25000 reference configuration.
struct ScenarioConfig {
  std::size_t n_theta = 31;
  std::size_t n_freq = 3;
  // 50 x 50 x 10 = 25000 voxels; voxel centers are spread evenly over roi_extent.
  GridDims grid{50, 50, 10};
  double voxel_size_l = 1.5;
  double roi_offset_z0 = 195.0;
  std::array<double, 3> roi_extent{36.0, 36.0, 7.5};
  double center_freq_hz = 60e9;
  double bandwidth_hz = 6e9;
  std::uint64_t rng_seed = 1;
  double snr_db = 30.0;  // +inf means noiseless

  std::size_t n_measurements() const { return n_theta * n_freq; }
  std::size_t n_pixels() const { return grid.count(); }
  double center_wavelength() const { return kSpeedOfLight / center_freq_hz; }

  /// n_freq frequencies evenly spaced over [fc - B/2, fc + B/2]; fc alone when n_freq == 1.
  std::vector<double> frequencies() const;

  /// One message per violated invariant, empty when valid.
  std::vector<std::string> violations() const;
  /// Throws ValidationError listing every violation.
  void validate() const;
};

/// Axis-aligned voxel box: `origin` inclusive, `size` voxels along each axis.
struct VoxelBox {
  std::array<std::size_t, 3> origin{0, 0, 0};
  std::array<std::size_t, 3> size{1, 1, 1};
};

struct Target {
  VoxelBox box;
  Complex amplitude{1.0, 0.0};
};

struct Scene {
  CVector reflectivity;
  GridDims grid;

  /// Indices p with reflectivity[p] != 0, ascending.
  std::vector<std::size_t> support() const;
};

struct RowMeta {
  std::size_t rotation_index = 0;
  std::size_t frequency_index = 0;
};

struct SensingMatrix {
  CMatrix entries;
  std::vector<RowMeta> row_meta;

  std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
};

struct Measurement {
  CVector g;
  double noise_power = 0.0;  // per-entry variance of w
  double realized_snr_db = std::numeric_limits<double>::infinity();
};

/// Voxel center in meters; the ROI is centered at the origin.
std::array<double, 3> voxel_center(const ScenarioConfig& config, std::size_t p);

/// Virtual focal point in meters, on the boresight (z) axis z0 wavelengths before the ROI center.
std::array<double, 3> focal_point(const ScenarioConfig& config);

/// Code phase phi(r, p) in [0, 2 pi), a pure function of (seed, r, p).
double code_phase(std::uint64_t seed, std::size_t rotation, std::size_t pixel);

/// Sum of box indicators scaled by amplitudes. Throws RangeError when a box leaves the grid.
Scene build_phantom(const ScenarioConfig& config, const std::vector<Target>& targets);

/// Entry (r, f; p) = exp(-j 2 k_f d_p + j phi(r, p)) / d_p^2. Rows are rotation-major.
/// Output is independent of `workers`.
SensingMatrix synthesize_sensing_matrix(const ScenarioConfig& config, std::size_t workers = 1);

/// g = H u + w with circular complex Gaussian w scaled to `snr_db`. Zero signal
/// yields zero noise and an infinite realized SNR.
Measurement forward_measure(const SensingMatrix& H, const Scene& scene, double snr_db, std::uint64_t seed);
Measurement forward_measure(const CMatrix& H, const CVector& u, double snr_db, std::uint64_t seed);

}  // namespace clns
