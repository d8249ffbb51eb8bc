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

#include "clns/scene_forward.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace clns {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::vector<double> ScenarioConfig::frequencies() const {
  std::vector<double> f(n_freq);
  if (n_freq == 1) {
    f[0] = center_freq_hz;
    return f;
  }
  const double lo = center_freq_hz - 0.5 * bandwidth_hz;
  const double step = bandwidth_hz / static_cast<double>(n_freq - 1);
  for (std::size_t i = 0; i < n_freq; ++i) f[i] = lo + step * static_cast<double>(i);
  return f;
}

std::vector<std::string> ScenarioConfig::violations() const {
  std::vector<std::string> out;
  if (n_theta < 1) out.emplace_back("scenario.n_theta: must be >= 1");
  if (n_freq < 1) out.emplace_back("scenario.n_freq: must be >= 1");
  if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1) out.emplace_back("scenario.grid: every voxel count must be >= 1");
  if (!finite_positive(voxel_size_l)) out.emplace_back("scenario.voxel_size_l: must be finite and > 0");
  if (!finite_positive(roi_offset_z0)) out.emplace_back("scenario.roi_offset_z0: must be finite and > 0");
  for (std::size_t a = 0; a < 3; ++a) {
    if (!finite_positive(roi_extent[a])) {
      out.emplace_back("scenario.roi_extent[" + std::to_string(a) + "]: must be finite and > 0");
    }
  }
  if (!finite_positive(center_freq_hz)) out.emplace_back("scenario.center_freq_hz: must be finite and > 0");
  if (!std::isfinite(bandwidth_hz) || bandwidth_hz < 0.0) {
    out.emplace_back("scenario.bandwidth_hz: must be finite and >= 0");
  } else if (finite_positive(center_freq_hz) && bandwidth_hz >= 2.0 * center_freq_hz) {
    out.emplace_back("scenario.bandwidth_hz: lowest frequency must stay > 0");
  }
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    out.emplace_back("scenario.snr_db: must be a real number or +inf");
  }
  return out;
}

void ScenarioConfig::validate() const {
  auto v = violations();
  if (!v.empty()) throw ValidationError(std::move(v));
}

std::vector<std::size_t> Scene::support() const {
  std::vector<std::size_t> s;
  for (Eigen::Index p = 0; p < reflectivity.size(); ++p) {
    if (reflectivity[p] != Complex(0.0, 0.0)) s.push_back(static_cast<std::size_t>(p));
  }
  return s;
}

std::array<double, 3> voxel_center(const ScenarioConfig& config, std::size_t p) {
  const auto& g = config.grid;
  const std::array<std::size_t, 3> idx{p % g.nx, (p / g.nx) % g.ny, p / (g.nx * g.ny)};
  const std::array<std::size_t, 3> n{g.nx, g.ny, g.nz};
  const double lambda_c = config.center_wavelength();
  std::array<double, 3> c{};
  for (std::size_t a = 0; a < 3; ++a) {
    const double extent = config.roi_extent[a] * lambda_c;
    c[a] = (static_cast<double>(idx[a]) + 0.5) * extent / static_cast<double>(n[a]) - 0.5 * extent;
  }
  return c;
}

std::array<double, 3> focal_point(const ScenarioConfig& config) {
  return {0.0, 0.0, -config.roi_offset_z0 * config.center_wavelength()};
}

double code_phase(std::uint64_t seed, std::size_t rotation, std::size_t pixel) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(rotation));
  h = splitmix64(h ^ static_cast<std::uint64_t>(pixel));
  const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
  return 2.0 * std::numbers::pi * unit;
}

Scene build_phantom(const ScenarioConfig& config, const std::vector<Target>& targets) {
  const GridDims& grid = config.grid;
  const std::array<std::size_t, 3> n{grid.nx, grid.ny, grid.nz};
  Scene scene{CVector::Zero(static_cast<Eigen::Index>(grid.count())), grid};
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto& box = targets[t].box;
    for (std::size_t a = 0; a < 3; ++a) {
      if (box.size[a] == 0 || box.origin[a] >= n[a] || box.size[a] > n[a] - box.origin[a]) {
        throw RangeError("target " + std::to_string(t) + ": box leaves the grid along axis " + std::to_string(a));
      }
    }
    const Complex amp = targets[t].amplitude;
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag())) {
      throw RangeError("target " + std::to_string(t) + ": amplitude is not finite");
    }
    for (std::size_t z = box.origin[2]; z < box.origin[2] + box.size[2]; ++z)
      for (std::size_t y = box.origin[1]; y < box.origin[1] + box.size[1]; ++y)
        for (std::size_t x = box.origin[0]; x < box.origin[0] + box.size[0]; ++x)
          scene.reflectivity[static_cast<Eigen::Index>(grid.index(x, y, z))] += amp;
  }
  return scene;
}

SensingMatrix synthesize_sensing_matrix(const ScenarioConfig& config, std::size_t workers) {
  config.validate();
  const std::size_t n_pix = config.n_pixels();
  const std::size_t n_rows = config.n_measurements();
  const auto freqs = config.frequencies();
  const auto focus = focal_point(config);

  // Distance-dependent amplitude and two-way path length are shared by all rows.
  std::vector<double> dist(n_pix);
  RVector amp(static_cast<Eigen::Index>(n_pix));
  for (std::size_t p = 0; p < n_pix; ++p) {
    const auto c = voxel_center(config, p);
    const double dx = c[0] - focus[0], dy = c[1] - focus[1], dz = c[2] - focus[2];
    dist[p] = std::sqrt(dx * dx + dy * dy + dz * dz);
    amp[static_cast<Eigen::Index>(p)] = 1.0 / (dist[p] * dist[p]);
  }

  SensingMatrix H;
  H.entries.resize(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_pix));
  H.row_meta.resize(n_rows);
  const int threads = static_cast<int>(std::max<std::size_t>(workers, 1));

#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(config.n_theta); ++r) {
    for (std::size_t f = 0; f < config.n_freq; ++f) {
      const std::size_t row = static_cast<std::size_t>(r) * config.n_freq + f;
      H.row_meta[row] = RowMeta{static_cast<std::size_t>(r), f};
      const double k = 2.0 * std::numbers::pi * freqs[f] / kSpeedOfLight;
      for (std::size_t p = 0; p < n_pix; ++p) {
        const double phase = -2.0 * k * dist[p] + code_phase(config.rng_seed, static_cast<std::size_t>(r), p);
        H.entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(p)) =
            std::polar(amp[static_cast<Eigen::Index>(p)], phase);
      }
    }
  }
  return H;
}

Measurement forward_measure(const CMatrix& H, const CVector& u, double snr_db, std::uint64_t seed) {
  if (H.cols() != u.size()) {
    throw ShapeError("forward_measure: H has " + std::to_string(H.cols()) + " columns but u has " +
                     std::to_string(u.size()) + " entries");
  }
  if (std::isnan(snr_db)) throw ParameterError("forward_measure: snr_db is NaN");

  Measurement m;
  m.g = H * u;
  const double signal = m.g.squaredNorm();
  if (signal == 0.0 || snr_db == std::numeric_limits<double>::infinity() || m.g.size() == 0) {
    m.noise_power = 0.0;
    m.realized_snr_db = std::numeric_limits<double>::infinity();
    return m;
  }

  const double n = static_cast<double>(m.g.size());
  m.noise_power = signal / (n * std::pow(10.0, snr_db / 10.0));
  // Circular symmetry: real and imaginary parts each carry half the variance.
  const double sigma = std::sqrt(0.5 * m.noise_power);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  CVector w(m.g.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    w[i] = Complex(re, im);
  }
  m.g += w;
  const double wn = w.squaredNorm();
  m.realized_snr_db =
      wn > 0.0 ? 10.0 * std::log10(signal / wn) : std::numeric_limits<double>::infinity();
  return m;
}

Measurement forward_measure(const SensingMatrix& H, const Scene& scene, double snr_db, std::uint64_t seed) {
  return forward_measure(H.entries, scene.reflectivity, snr_db, seed);
}

}  // namespace clns
