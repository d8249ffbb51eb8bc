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

#include "clns/consensus_admm.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <string>
#include <thread>

namespace clns {

namespace {

int resolve_workers(std::size_t workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<int>(workers);
}

void require_same_size(const CVector& a, const CVector& b, const char* what) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

double l1_norm(const CVector& v) { return v.cwiseAbs().sum(); }

}  // namespace

Partition partition_rows(std::size_t n_rows, std::size_t n_blocks) {
  if (n_blocks < 1 || n_blocks > n_rows) {
    throw ParameterError("partition_rows: block count " + std::to_string(n_blocks) + " must lie in [1, " +
                         std::to_string(n_rows) + "]");
  }
  Partition part;
  part.blocks.reserve(n_blocks);
  const std::size_t base = n_rows / n_blocks;
  const std::size_t extra = n_rows % n_blocks;
  std::size_t start = 0;
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    part.blocks.push_back({start, start + len});
    start += len;
  }
  return part;
}

Partition partition_rows(const SensingMatrix& H, const Measurement& g, std::size_t n_blocks) {
  if (static_cast<std::size_t>(g.g.size()) != H.rows()) {
    throw ShapeError("partition_rows: H has " + std::to_string(H.rows()) + " rows but g has " +
                     std::to_string(g.g.size()) + " entries");
  }
  return partition_rows(H.rows(), n_blocks);
}

std::vector<std::string> AdmmParams::violations() const {
  std::vector<std::string> out;
  if (!std::isfinite(lambda) || lambda < 0.0) out.emplace_back("admm.lambda: must be finite and >= 0");
  if (!std::isfinite(rho) || rho <= 0.0) out.emplace_back("admm.rho: must be finite and > 0");
  if (max_iter < 1) out.emplace_back("admm.max_iter: must be >= 1");
  // Zero tolerances select the fixed-iteration-budget mode.
  if (!std::isfinite(eps_abs) || eps_abs < 0.0) out.emplace_back("admm.eps_abs: must be finite and >= 0");
  if (!std::isfinite(eps_rel) || eps_rel < 0.0) out.emplace_back("admm.eps_rel: must be finite and >= 0");
  return out;
}

void AdmmParams::validate() const {
  auto v = violations();
  if (!v.empty()) throw ValidationError(std::move(v));
}

BlockSolver::BlockSolver(CMatrix h_block, CVector g_block, double rho)
    : h_block_(std::move(h_block)), g_block_(std::move(g_block)), rho_(rho) {
  if (!std::isfinite(rho_) || rho_ <= 0.0) throw ParameterError("BlockSolver: rho must be finite and > 0");
  if (g_block_.size() != h_block_.rows()) {
    throw ShapeError("BlockSolver: block has " + std::to_string(h_block_.rows()) + " rows but g_i has " +
                     std::to_string(g_block_.size()) + " entries");
  }
  if (!h_block_.allFinite() || !g_block_.allFinite()) throw NumericError("BlockSolver: non-finite entries in block");

  hg_ = h_block_.adjoint() * g_block_;

  const Eigen::Index m = h_block_.rows();
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(m, m);
  gram.noalias() += (h_block_ * h_block_.adjoint()) / rho_;
  gram = (0.5 * (gram + gram.adjoint())).eval();
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericError("BlockSolver: Cholesky factorization failed");
  small_inverse_ = llt.solve(Eigen::MatrixXcd::Identity(m, m));
  small_inverse_ = (0.5 * (small_inverse_ + small_inverse_.adjoint())).eval();
  if (!small_inverse_.allFinite()) throw NumericError("BlockSolver: non-finite small inverse");
}

CVector BlockSolver::apply_inverse(const CVector& b) const {
  if (static_cast<std::size_t>(b.size()) != cols()) {
    throw ShapeError("BlockSolver::apply_inverse: expected length " + std::to_string(cols()) + ", got " +
                     std::to_string(b.size()));
  }
  const CVector y = small_inverse_ * (h_block_ * b);
  CVector out = b / rho_;
  out.noalias() -= h_block_.adjoint() * (y / (rho_ * rho_));
  return out;
}

void BlockSolver::update_u_into(const CVector& v, const CVector& s, CVector& out) const {
  out.resize(v.size());
  out.noalias() = hg_ + rho_ * (v - s);
  const CVector y = small_inverse_ * (h_block_ * out);
  out /= rho_;
  out.noalias() -= h_block_.adjoint() * (y / (rho_ * rho_));
}

BlockSolver precompute_block_solver(const CMatrix& h_block, const CVector& g_block, double rho) {
  return BlockSolver(h_block, g_block, rho);
}

CVector update_u(const BlockSolver& solver, const CVector& v, const CVector& s) {
  if (static_cast<std::size_t>(v.size()) != solver.cols() || static_cast<std::size_t>(s.size()) != solver.cols()) {
    throw ShapeError("update_u: v and s_i must have length " + std::to_string(solver.cols()));
  }
  CVector out;
  solver.update_u_into(v, s, out);
  return out;
}

double soft_threshold(double a, double kappa) {
  if (a > kappa) return a - kappa;
  if (a < -kappa) return a + kappa;
  return 0.0;
}

Complex soft_threshold(Complex a, double kappa) {
  const double mag = std::abs(a);
  if (mag <= kappa) return {0.0, 0.0};
  return a * ((mag - kappa) / mag);
}

CVector soft_threshold(const CVector& a, double kappa) {
  return a.unaryExpr([kappa](Complex x) { return soft_threshold(x, kappa); });
}

CVector update_v(const CVector& u_bar, const CVector& s_bar, const AdmmParams& params, std::size_t n_blocks) {
  require_same_size(u_bar, s_bar, "update_v");
  if (n_blocks < 1) throw ParameterError("update_v: block count must be >= 1");
  return soft_threshold(CVector(u_bar + s_bar), params.lambda / (params.rho * static_cast<double>(n_blocks)));
}

CVector update_s(const CVector& s, const CVector& u, const CVector& v) {
  require_same_size(s, u, "update_s");
  require_same_size(s, v, "update_s");
  return s + u - v;
}

double evaluate_objective(const CMatrix& H, const CVector& g, const CVector& u, double lambda) {
  if (H.rows() != g.size() || H.cols() != u.size()) {
    throw ShapeError("evaluate_objective: H is " + std::to_string(H.rows()) + "x" + std::to_string(H.cols()) +
                     ", g has " + std::to_string(g.size()) + ", u has " + std::to_string(u.size()));
  }
  return 0.5 * (H * u - g).squaredNorm() + lambda * l1_norm(u);
}

double evaluate_augmented_lagrangian(const std::vector<BlockSolver>& blocks, const AdmmState& state,
                                     const AdmmParams& params) {
  if (state.u_blocks.size() != blocks.size() || state.s_blocks.size() != blocks.size()) {
    throw ShapeError("evaluate_augmented_lagrangian: state has " + std::to_string(state.u_blocks.size()) +
                     " u blocks and " + std::to_string(state.s_blocks.size()) + " s blocks for " +
                     std::to_string(blocks.size()) + " solver blocks");
  }
  double fit = 0.0, coupling = 0.0, duals = 0.0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& u = state.u_blocks[i];
    const auto& s = state.s_blocks[i];
    if (static_cast<std::size_t>(u.size()) != blocks[i].cols() || u.size() != state.v.size() ||
        s.size() != state.v.size()) {
      throw ShapeError("evaluate_augmented_lagrangian: block " + std::to_string(i) + " has mismatched lengths");
    }
    fit += (blocks[i].h_block() * u - blocks[i].g_block()).squaredNorm();
    coupling += (u - state.v + s).squaredNorm();
    duals += s.squaredNorm();
  }
  return 0.5 * fit + params.lambda * l1_norm(state.v) + 0.5 * params.rho * (coupling - duals);
}

ConsensusLassoSolver::ConsensusLassoSolver(const CMatrix& H, const CVector& g, const AdmmParams& params,
                                           std::size_t n_blocks)
    : params_(params) {
  params_.validate();
  if (H.rows() != g.size()) {
    throw ShapeError("consensus lasso: H has " + std::to_string(H.rows()) + " rows but g has " +
                     std::to_string(g.size()) + " entries");
  }
  partition_ = partition_rows(static_cast<std::size_t>(H.rows()), n_blocks);
  blocks_.reserve(partition_.count());
  for (const auto& range : partition_.blocks) {
    const auto start = static_cast<Eigen::Index>(range.start);
    const auto len = static_cast<Eigen::Index>(range.size());
    blocks_.emplace_back(H.middleRows(start, len), g.segment(start, len), params_.rho);
  }
}

ConsensusLassoSolver::ConsensusLassoSolver(const SensingMatrix& H, const Measurement& g, const AdmmParams& params,
                                           std::size_t n_blocks)
    : ConsensusLassoSolver(H.entries, g.g, params, n_blocks) {}

AdmmResult ConsensusLassoSolver::solve(const SolveOptions& options) const {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  const std::size_t n_blocks = blocks_.size();
  const auto nb = static_cast<std::ptrdiff_t>(n_blocks);
  const Eigen::Index n_pix = static_cast<Eigen::Index>(blocks_.front().cols());
  const double rho = params_.rho;
  const double kappa = params_.lambda / (rho * static_cast<double>(n_blocks));
  const double sqrt_n = std::sqrt(static_cast<double>(n_blocks));
  const double abs_scale = std::sqrt(static_cast<double>(n_blocks) * static_cast<double>(n_pix)) * params_.eps_abs;
  const int threads = resolve_workers(options.workers);

  AdmmResult result;
  AdmmState& st = result.state;
  st.u_blocks.assign(n_blocks, CVector::Zero(n_pix));
  st.s_blocks.assign(n_blocks, CVector::Zero(n_pix));
  st.v = CVector::Zero(n_pix);
  st.k = 0;
  result.trace.reserve(params_.max_iter);

  CVector v_prev(n_pix);
  std::vector<double> primal_sq(n_blocks), u_sq(n_blocks), s_sq(n_blocks), fit_sq(n_blocks);
  const double inv_n = 1.0 / static_cast<double>(n_blocks);

  for (std::size_t k = 0; k < params_.max_iter; ++k) {
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t i = 0; i < nb; ++i) {
      blocks_[i].update_u_into(st.v, st.s_blocks[i], st.u_blocks[i]);
    }

    // Consensus: every pixel sums its blocks in index order, so the result
    // does not depend on how pixels are spread over threads.
    v_prev.swap(st.v);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (Eigen::Index p = 0; p < n_pix; ++p) {
      Complex acc_u(0.0, 0.0), acc_s(0.0, 0.0);
      for (std::size_t i = 0; i < n_blocks; ++i) {
        acc_u += st.u_blocks[i][p];
        acc_s += st.s_blocks[i][p];
      }
      st.v[p] = soft_threshold(acc_u * inv_n + acc_s * inv_n, kappa);
    }

#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t i = 0; i < nb; ++i) {
      const auto& blk = blocks_[i];
      auto& u = st.u_blocks[i];
      auto& s = st.s_blocks[i];
      const CVector gap = u - st.v;
      s += gap;
      primal_sq[i] = gap.squaredNorm();
      u_sq[i] = u.squaredNorm();
      s_sq[i] = s.squaredNorm();
      fit_sq[i] = (blk.h_block() * st.v - blk.g_block()).squaredNorm();
    }

    double primal_sum = 0.0, u_sum = 0.0, s_sum = 0.0, fit_sum = 0.0;
    for (std::size_t i = 0; i < n_blocks; ++i) {
      primal_sum += primal_sq[i];
      u_sum += u_sq[i];
      s_sum += s_sq[i];
      fit_sum += fit_sq[i];
    }

    TraceRecord rec;
    rec.iter = k + 1;
    rec.objective = 0.5 * fit_sum + params_.lambda * l1_norm(st.v);
    rec.primal_residual = std::sqrt(primal_sum);
    rec.dual_residual = rho * sqrt_n * (st.v - v_prev).norm();
    rec.elapsed_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    st.k = k + 1;

    if (!std::isfinite(rec.objective) || !std::isfinite(rec.primal_residual) || !std::isfinite(rec.dual_residual) ||
        !std::isfinite(s_sum) || !std::isfinite(u_sum)) {
      throw NumericError("consensus ADMM diverged: non-finite iterate at iteration " + std::to_string(rec.iter));
    }

    result.trace.push_back(rec);
    if (options.on_iteration) options.on_iteration(rec);

    const double eps_pri = abs_scale + params_.eps_rel * std::max(std::sqrt(u_sum), sqrt_n * st.v.norm());
    const double eps_dual = abs_scale + params_.eps_rel * rho * std::sqrt(s_sum);
    if (rec.primal_residual <= eps_pri && rec.dual_residual <= eps_dual) {
      result.converged = true;
      break;
    }
  }

  result.v = st.v;
  return result;
}

AdmmResult solve_consensus_lasso(const CMatrix& H, const CVector& g, const AdmmParams& params, std::size_t n_blocks,
                                 const SolveOptions& options) {
  return ConsensusLassoSolver(H, g, params, n_blocks).solve(options);
}

AdmmResult solve_consensus_lasso(const SensingMatrix& H, const Measurement& g, const AdmmParams& params,
                                 std::size_t n_blocks, const SolveOptions& options) {
  return ConsensusLassoSolver(H, g, params, n_blocks).solve(options);
}

}  // namespace clns
