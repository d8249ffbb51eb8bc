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

// Reference solvers: truncated-SVD pseudoinverse, FISTA for the lasso, and a
// first-order optimality (KKT) check that is independent of both solvers.

#include <cstddef>

#include "clns/consensus_admm.hpp"
#include "clns/types.hpp"

namespace clns {

inline constexpr double kDefaultTruncRelTol = 1e-10;

/// Minimum-norm least squares V S^+ U^* g, dropping singular values below
/// trunc_rel_tol * sigma_max.
CVector solve_pseudoinverse(const CMatrix& H, const CVector& g, double trunc_rel_tol = kDefaultTruncRelTol);

/// sigma_max(H)^2 by 30 power iterations on H^* H from a fixed-seed start,
/// inflated by 1%.
double estimate_lipschitz(const CMatrix& H);

struct FistaResult {
  CVector u;
  /// objective: lasso objective at the iterate; primal_residual: ||H u - g||;
  /// dual_residual: L ||u_k - u_{k-1}||.
  ConvergenceTrace trace;
  double lipschitz = 0.0;
};

/// Accelerated proximal gradient with step 1/L. Stops after max_iter or when the
/// relative objective change drops below tol.
FistaResult solve_fista(const CMatrix& H, const CVector& g, double lambda, std::size_t max_iter, double tol);

struct KktReport {
  /// max over v_p != 0 of |[H^*(Hv - g)]_p + lambda v_p / |v_p||.
  double max_active_violation = 0.0;
  /// max over v_p == 0 of max(|[H^*(Hv - g)]_p| - lambda, 0).
  double max_inactive_excess = 0.0;
  bool passed = false;
};

KktReport check_lasso_kkt(const CMatrix& H, const CVector& g, double lambda, const CVector& v, double tol);

}  // namespace clns
