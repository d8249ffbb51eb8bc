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

#include "clns/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/SVD>

namespace clns {

namespace {

void require_system(const CMatrix& H, const CVector& g, const char* what) {
  if (H.rows() != g.size()) {
    throw ShapeError(std::string(what) + ": H has " + std::to_string(H.rows()) + " rows but g has " +
                     std::to_string(g.size()) + " entries");
  }
}

constexpr std::uint64_t kPowerIterationSeed = 0x5eedf157aULL;
constexpr int kPowerIterations = 30;
constexpr double kLipschitzInflation = 1.01;

}  // namespace

CVector solve_pseudoinverse(const CMatrix& H, const CVector& g, double trunc_rel_tol) {
  require_system(H, g, "solve_pseudoinverse");
  if (!(trunc_rel_tol > 0.0 && trunc_rel_tol < 1.0)) {
    throw ParameterError("solve_pseudoinverse: trunc_rel_tol must lie in (0, 1)");
  }
  if (H.size() == 0) return CVector::Zero(H.cols());
  if (!H.allFinite() || !g.allFinite()) throw NumericError("solve_pseudoinverse: non-finite input");

  const Eigen::MatrixXcd A = H;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("solve_pseudoinverse: SVD did not converge");

  const RVector& sigma = svd.singularValues();
  const double cutoff = trunc_rel_tol * (sigma.size() > 0 ? sigma[0] : 0.0);
  CVector coeff = svd.matrixU().adjoint() * g;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    coeff[k] = (sigma[k] > 0.0 && sigma[k] >= cutoff) ? coeff[k] / sigma[k] : Complex(0.0, 0.0);
  }
  return svd.matrixV() * coeff;
}

double estimate_lipschitz(const CMatrix& H) {
  if (H.size() == 0) return 0.0;
  std::mt19937_64 rng(kPowerIterationSeed);
  std::normal_distribution<double> normal;
  CVector x(H.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    x[i] = Complex(re, im);
  }
  x.normalize();
  for (int it = 0; it < kPowerIterations; ++it) {
    CVector y = H.adjoint() * (H * x);
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    x = y / n;
  }
  return kLipschitzInflation * (H * x).squaredNorm();
}

FistaResult solve_fista(const CMatrix& H, const CVector& g, double lambda, std::size_t max_iter, double tol) {
  require_system(H, g, "solve_fista");
  if (!std::isfinite(lambda) || lambda < 0.0) throw ParameterError("solve_fista: lambda must be finite and >= 0");
  if (std::isnan(tol) || tol < 0.0) throw ParameterError("solve_fista: tol must be >= 0");

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  FistaResult out;
  out.lipschitz = estimate_lipschitz(H);
  // A zero operator has a zero gradient; any step length works.
  const double L = out.lipschitz > 0.0 ? out.lipschitz : 1.0;
  const double step = 1.0 / L;

  CVector x = CVector::Zero(H.cols());
  CVector x_prev = x;
  CVector y = x;
  double t = 1.0;
  double prev_obj = std::numeric_limits<double>::quiet_NaN();
  out.trace.reserve(max_iter);

  for (std::size_t k = 0; k < max_iter; ++k) {
    const CVector grad = H.adjoint() * (H * y - g);
    x_prev.swap(x);
    x = soft_threshold(CVector(y - step * grad), lambda * step);

    const CVector resid = H * x - g;
    TraceRecord rec;
    rec.iter = k + 1;
    rec.objective = 0.5 * resid.squaredNorm() + lambda * x.cwiseAbs().sum();
    rec.primal_residual = resid.norm();
    rec.dual_residual = L * (x - x_prev).norm();
    rec.elapsed_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (!std::isfinite(rec.objective)) {
      throw NumericError("FISTA diverged: non-finite objective at iteration " + std::to_string(rec.iter));
    }
    out.trace.push_back(rec);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;

    if (k > 0) {
      const double scale = std::max(std::abs(prev_obj), std::numeric_limits<double>::min());
      if (std::abs(rec.objective - prev_obj) < tol * scale) break;
    }
    prev_obj = rec.objective;
  }
  out.u = x;
  return out;
}

KktReport check_lasso_kkt(const CMatrix& H, const CVector& g, double lambda, const CVector& v, double tol) {
  require_system(H, g, "check_lasso_kkt");
  if (H.cols() != v.size()) {
    throw ShapeError("check_lasso_kkt: H has " + std::to_string(H.cols()) + " columns but v has " +
                     std::to_string(v.size()) + " entries");
  }
  const CVector grad = H.adjoint() * (H * v - g);
  const double vmax = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
  const double zero_cut = vmax > 0.0 ? 1e-12 * vmax : 1e-14;

  KktReport rep;
  for (Eigen::Index p = 0; p < v.size(); ++p) {
    const double mag = std::abs(v[p]);
    if (mag <= zero_cut) {
      rep.max_inactive_excess = std::max(rep.max_inactive_excess, std::abs(grad[p]) - lambda);
    } else {
      rep.max_active_violation = std::max(rep.max_active_violation, std::abs(grad[p] + lambda * v[p] / mag));
    }
  }
  rep.max_inactive_excess = std::max(rep.max_inactive_excess, 0.0);
  rep.passed = rep.max_active_violation <= tol && rep.max_inactive_excess <= tol;
  return rep;
}

}  // namespace clns
