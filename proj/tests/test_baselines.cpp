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

#include <cmath>

#include <gtest/gtest.h>

#include "clns/baselines.hpp"
#include "clns/consensus_admm.hpp"
#include "oracles.hpp"

using namespace clns;

namespace {

CVector vec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST(Pseudoinverse, Identity) {
  std::mt19937_64 rng(1);
  const CVector g = oracle::random_vector(rng, 6);
  EXPECT_LE(oracle::max_abs_diff(solve_pseudoinverse(CMatrix::Identity(6, 6), g), g), 1e-15);
}

TEST(Pseudoinverse, RankDeficientLeavesNullDirection) {
  CMatrix H(2, 2);
  H << 1.0, 0.0, 0.0, 0.0;
  EXPECT_LE(oracle::max_abs_diff(solve_pseudoinverse(H, vec({2.0, 5.0})), vec({2.0, 0.0})), 1e-15);
}

TEST(Pseudoinverse, ProjectsOntoRange) {
  std::mt19937_64 rng(2);
  // Rank-2 4x10 matrix so that range(H) is a proper subspace.
  const CMatrix A = oracle::random_matrix(rng, 4, 2);
  const CMatrix B = oracle::random_matrix(rng, 2, 10);
  const CMatrix H = A * B;
  const CVector g = oracle::random_vector(rng, 4);
  const CVector u = solve_pseudoinverse(H, g, 1e-10);

  const Eigen::MatrixXcd Q = Eigen::HouseholderQR<Eigen::MatrixXcd>(A).householderQ() * Eigen::MatrixXcd::Identity(4, 2);
  const CVector proj = Q * (Q.adjoint() * g);
  EXPECT_LE(oracle::rel_err(H * u, proj), 1e-10);

  const Eigen::MatrixXcd Hd = H;
  const CVector min_norm = Hd.completeOrthogonalDecomposition().solve(g);
  EXPECT_LE(oracle::rel_err(u, min_norm), 1e-10);
}

TEST(Pseudoinverse, ResidualIsOptimal) {
  std::mt19937_64 rng(3);
  for (int inst = 0; inst < 5; ++inst) {
    const CMatrix H = oracle::random_matrix(rng, 9, 4);
    const CVector g = oracle::random_vector(rng, 9);
    const double best = (H * solve_pseudoinverse(H, g) - g).norm();
    for (int c = 0; c < 100; ++c) {
      const CVector u = oracle::random_vector(rng, 4);
      EXPECT_LE(best, (H * u - g).norm() + 1e-10);
    }
  }
}

TEST(Pseudoinverse, RejectsBadTolerance) {
  EXPECT_THROW(solve_pseudoinverse(CMatrix::Identity(2, 2), CVector::Zero(2), 0.0), ParameterError);
  EXPECT_THROW(solve_pseudoinverse(CMatrix::Identity(2, 2), CVector::Zero(2), 1.0), ParameterError);
  EXPECT_THROW(solve_pseudoinverse(CMatrix::Identity(2, 2), CVector::Zero(3)), ShapeError);
}

TEST(Lipschitz, BoundsSpectralNorm) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const CMatrix H = oracle::random_matrix(rng, 12, 40);
    const double s = Eigen::JacobiSVD<Eigen::MatrixXcd>(Eigen::MatrixXcd(H)).singularValues()[0];
    const double L = estimate_lipschitz(H);
    EXPECT_LE(L, 1.01 * s * s * (1 + 1e-12));
    EXPECT_GE(L, 0.99 * s * s);
  }
  EXPECT_EQ(estimate_lipschitz(CMatrix::Zero(3, 3)), 0.0);
}

TEST(Fista, IdentityClosedForm) {
  const FistaResult r = solve_fista(CMatrix::Identity(2, 2), vec({3.0, 0.5}), 1.0, 1000, 1e-14);
  EXPECT_LE(oracle::max_abs_diff(r.u, vec({2.0, 0.0})), 1e-6);
}

TEST(Fista, ZeroPenaltyIsLeastSquares) {
  std::mt19937_64 rng(5);
  const CMatrix H = oracle::random_matrix(rng, 15, 6);
  const CVector g = oracle::random_vector(rng, 15);
  const FistaResult r = solve_fista(H, g, 0.0, 20000, 0.0);
  EXPECT_LE(oracle::max_abs_diff(r.u, oracle::normal_equations(H, g)), 1e-6);
}

TEST(Fista, AgreesWithConsensusAdmm) {
  std::mt19937_64 rng(6);
  const CMatrix H = oracle::random_matrix(rng, 10, 30);
  const CVector g = oracle::random_vector(rng, 10);
  const double lambda = 0.8;
  const FistaResult f = solve_fista(H, g, lambda, 50000, 1e-15);
  AdmmParams p;
  p.lambda = lambda;
  p.max_iter = 50000;
  p.eps_abs = 1e-10;
  p.eps_rel = 1e-10;
  const AdmmResult a = solve_consensus_lasso(H, g, p, 2);
  const double fo = evaluate_objective(H, g, f.u, lambda);
  const double ao = evaluate_objective(H, g, a.v, lambda);
  EXPECT_LE(std::abs(fo - ao) / ao, 1e-5);
}

TEST(Fista, RunningMinimumIsNonIncreasing) {
  std::mt19937_64 rng(7);
  const CMatrix H = oracle::random_matrix(rng, 8, 25);
  const CVector g = oracle::random_vector(rng, 8);
  const FistaResult r = solve_fista(H, g, 0.3, 500, 0.0);
  ASSERT_EQ(r.trace.size(), 500u);
  double best = r.trace.front().objective;
  for (const auto& rec : r.trace) {
    const double next = std::min(best, rec.objective);
    EXPECT_LE(next, best);
    best = next;
  }
  EXPECT_LT(best, r.trace.front().objective);
}

TEST(Fista, StopsOnRelativeObjectiveChange) {
  const FistaResult r = solve_fista(CMatrix::Identity(3, 3), vec({1.0, 2.0, 3.0}), 0.1, 1000, 1e-6);
  EXPECT_LT(r.trace.size(), 1000u);
}

TEST(Kkt, ExactProxPasses) {
  std::mt19937_64 rng(8);
  const CVector g = oracle::random_vector(rng, 20);
  const double lambda = 0.9;
  const KktReport rep = check_lasso_kkt(CMatrix::Identity(20, 20), g, lambda, oracle::polar_prox(g, lambda), 1e-10);
  EXPECT_TRUE(rep.passed) << rep.max_active_violation << " " << rep.max_inactive_excess;
}

TEST(Kkt, ZeroIsOptimalForLargePenalty) {
  std::mt19937_64 rng(9);
  const CMatrix H = oracle::random_matrix(rng, 5, 12);
  const CVector g = oracle::random_vector(rng, 5);
  const double lambda_max = (H.adjoint() * g).cwiseAbs().maxCoeff();
  EXPECT_TRUE(check_lasso_kkt(H, g, lambda_max, CVector::Zero(12), 1e-12).passed);
  EXPECT_FALSE(check_lasso_kkt(H, g, 0.5 * lambda_max, CVector::Zero(12), 1e-6).passed);
}

TEST(Kkt, PerturbedOptimumFails) {
  std::mt19937_64 rng(10);
  const CMatrix H = oracle::random_matrix(rng, 6, 15);
  const CVector g = oracle::random_vector(rng, 6);
  const double lambda = 1.0;
  AdmmParams p;
  p.lambda = lambda;
  p.max_iter = 20000;
  p.eps_abs = 1e-10;
  p.eps_rel = 1e-10;
  CVector v = solve_consensus_lasso(H, g, p, 2).v;
  ASSERT_TRUE(check_lasso_kkt(H, g, lambda, v, 1e-4).passed);
  v[0] += 0.1;
  EXPECT_FALSE(check_lasso_kkt(H, g, lambda, v, 1e-4).passed);
}

TEST(Kkt, ZeroPenaltyDegeneratesToGradientNorm) {
  std::mt19937_64 rng(11);
  const CMatrix H = oracle::random_matrix(rng, 10, 4);
  const CVector g = oracle::random_vector(rng, 10);
  const CVector u = oracle::normal_equations(H, g);
  EXPECT_TRUE(check_lasso_kkt(H, g, 0.0, u, 1e-9).passed);
  const CVector off = u + CVector::Constant(4, 0.1);
  const KktReport rep = check_lasso_kkt(H, g, 0.0, off, 1e-9);
  EXPECT_NEAR(rep.max_active_violation, (H.adjoint() * (H * off - g)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(check_lasso_kkt(H, g, 0.0, CVector::Zero(5), 1e-9), ShapeError);
}

TEST(CrossSolver, AgreementAndCertificates) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> rows(2, 12), cols(2, 40);
  std::uniform_real_distribution<double> decade(-2.0, 1.0);
  for (int inst = 0; inst < 20; ++inst) {
    const int m = rows(rng), n = cols(rng);
    const double lambda = std::pow(10.0, decade(rng));
    const CMatrix H = oracle::random_matrix(rng, m, n);
    const CVector g = oracle::random_vector(rng, m);
    AdmmParams p;
    p.lambda = lambda;
    p.max_iter = 50000;
    p.eps_abs = 1e-10;
    p.eps_rel = 1e-10;
    const AdmmResult a = solve_consensus_lasso(H, g, p, std::min<std::size_t>(2, m));
    const FistaResult f = solve_fista(H, g, lambda, 200000, 1e-16);
    const double ao = evaluate_objective(H, g, a.v, lambda);
    const double fo = evaluate_objective(H, g, f.u, lambda);
    EXPECT_LE(std::abs(ao - fo) / std::max(ao, fo), 1e-4) << "inst " << inst << " " << m << "x" << n;
    EXPECT_TRUE(check_lasso_kkt(H, g, lambda, a.v, 1e-3).passed) << "ADMM inst " << inst;
    EXPECT_TRUE(check_lasso_kkt(H, g, lambda, f.u, 1e-3).passed) << "FISTA inst " << inst;
  }
}
