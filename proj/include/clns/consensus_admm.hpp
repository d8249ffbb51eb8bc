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

// Row-partitioned consensus ADMM for the complex lasso
//
//   minimize  1/2 sum_i ||H_i u_i - g_i||^2 + lambda ||v||_1   s.t.  u_i = v,
//
// with scaled duals s_i. Each block keeps the small m_i x m_i inverse of
// (I + H_i H_i^* / rho) so the N_p x N_p system of the u-update is never formed.

#include <cstddef>
#include <functional>
#include <vector>

#include "clns/scene_forward.hpp"
#include "clns/types.hpp"

namespace clns {

struct RowRange {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::size_t size() const { return end - start; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// Balanced contiguous split of the rows; earlier blocks take the remainder.
struct Partition {
  std::vector<RowRange> blocks;
  std::size_t count() const { return blocks.size(); }
};

Partition partition_rows(std::size_t n_rows, std::size_t n_blocks);
/// Also checks that H and g agree on the number of rows.
Partition partition_rows(const SensingMatrix& H, const Measurement& g, std::size_t n_blocks);

struct AdmmParams {
  double lambda = 0.01;
  double rho = 1.0;
  std::size_t max_iter = 500;
  double eps_abs = 1e-6;
  double eps_rel = 1e-4;

  std::vector<std::string> violations() const;
  void validate() const;
};

/// Precomputed solver for one row block: applies (H_i^* H_i + rho I)^{-1}
/// through the matrix inversion lemma.
class BlockSolver {
 public:
  BlockSolver(CMatrix h_block, CVector g_block, double rho);

  const CMatrix& h_block() const { return h_block_; }
  const CVector& g_block() const { return g_block_; }
  /// H_i^* g_i.
  const CVector& hg() const { return hg_; }
  /// (I_{m_i} + H_i H_i^* / rho)^{-1}.
  const Eigen::MatrixXcd& small_inverse() const { return small_inverse_; }
  double rho() const { return rho_; }
  std::size_t rows() const { return static_cast<std::size_t>(h_block_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(h_block_.cols()); }

  /// (H_i^* H_i + rho I)^{-1} b = b/rho - H_i^* W (H_i b) / rho^2.
  CVector apply_inverse(const CVector& b) const;
  /// Writes (H_i^* H_i + rho I)^{-1} (H_i^* g_i + rho (v - s)) into `out`.
  void update_u_into(const CVector& v, const CVector& s, CVector& out) const;

 private:
  CMatrix h_block_;
  CVector g_block_;
  CVector hg_;
  Eigen::MatrixXcd small_inverse_;
  double rho_;
};

BlockSolver precompute_block_solver(const CMatrix& h_block, const CVector& g_block, double rho);

/// Minimizer of 1/2 ||H_i u - g_i||^2 + rho/2 ||u - v + s||^2.
CVector update_u(const BlockSolver& solver, const CVector& v, const CVector& s);

/// Real soft threshold: a - k (a > k), 0 (|a| <= k), a + k (a < -k).
double soft_threshold(double a, double kappa);
/// Complex soft threshold: shrinks the modulus by kappa, keeps the phase.
Complex soft_threshold(Complex a, double kappa);
CVector soft_threshold(const CVector& a, double kappa);

/// v = S_{lambda / (rho N)}(u_bar + s_bar).
CVector update_v(const CVector& u_bar, const CVector& s_bar, const AdmmParams& params, std::size_t n_blocks);

/// s + u - v.
CVector update_s(const CVector& s, const CVector& u, const CVector& v);

struct AdmmState {
  std::vector<CVector> u_blocks;
  CVector v;
  std::vector<CVector> s_blocks;
  std::size_t k = 0;
};

struct TraceRecord {
  std::size_t iter = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double elapsed_seconds = 0.0;
};

using ConvergenceTrace = std::vector<TraceRecord>;

struct SolveOptions {
  /// 0 selects the machine's hardware concurrency. Results do not depend on it.
  std::size_t workers = 0;
  /// Called after every completed iteration, in order.
  std::function<void(const TraceRecord&)> on_iteration;
};

struct AdmmResult {
  CVector v;
  ConvergenceTrace trace;
  AdmmState state;
  bool converged = false;
};

/// 1/2 ||H u - g||^2 + lambda sum_p |u_p|.
double evaluate_objective(const CMatrix& H, const CVector& g, const CVector& u, double lambda);

/// Augmented Lagrangian of the consensus problem in scaled-dual form.
double evaluate_augmented_lagrangian(const std::vector<BlockSolver>& blocks, const AdmmState& state,
                                     const AdmmParams& params);

/// Holds the partition and the per-block precomputation; `solve` may be
/// called repeatedly and from several threads.
class ConsensusLassoSolver {
 public:
  ConsensusLassoSolver(const CMatrix& H, const CVector& g, const AdmmParams& params, std::size_t n_blocks);
  ConsensusLassoSolver(const SensingMatrix& H, const Measurement& g, const AdmmParams& params,
                       std::size_t n_blocks);

  const Partition& partition() const { return partition_; }
  const std::vector<BlockSolver>& blocks() const { return blocks_; }
  const AdmmParams& params() const { return params_; }
  /// Number of small matrices inverted during precomputation.
  std::size_t inversion_count() const { return blocks_.size(); }

  AdmmResult solve(const SolveOptions& options = {}) const;

 private:
  AdmmParams params_;
  Partition partition_;
  std::vector<BlockSolver> blocks_;
};

AdmmResult solve_consensus_lasso(const CMatrix& H, const CVector& g, const AdmmParams& params,
                                 std::size_t n_blocks, const SolveOptions& options = {});
AdmmResult solve_consensus_lasso(const SensingMatrix& H, const Measurement& g, const AdmmParams& params,
                                 std::size_t n_blocks, const SolveOptions& options = {});

}  // namespace clns
