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

// Image-quality metrics, maximum-intensity projections and the on-disk formats.
//
// Binary array files (all integers little-endian):
//   bytes 0..7   magic "CLNSMAT1" (matrix) or "CLNSVEC1" (vector)
//   matrix: u64 rows, u64 cols; vector: u64 length
//   payload      row-major interleaved (real, imag) IEEE-754 binary64, little-endian
//
// Trace CSV: header `iter,objective,primal_residual,dual_residual,elapsed_seconds`,
// one row per iteration, reals printed with 17 significant digits.
//
// Views: binary PGM (P5), maxval 65535, big-endian samples, linear scale with the
// view maximum at 65535.

#include <cstdio>
#include <filesystem>
#include <string>

#include "clns/consensus_admm.hpp"
#include "clns/types.hpp"

namespace clns {

/// ||u_est - u_true||^2 / ||u_true||^2. Throws UndefinedMetricError for zero u_true.
double nmse(const CVector& u_est, const CVector& u_true);

struct SupportMetrics {
  double precision = 0.0;
  double recall = 0.0;
};

/// Estimated support is { p : |u_est_p| >= rel_threshold * max |u_est| }.
SupportMetrics support_metrics(const CVector& u_est, const CVector& u_true, double rel_threshold);

/// Maximum-intensity projections of |u|. top: ny x nx (along z); front: nz x nx
/// (along y); side: nz x ny (along x).
struct VolumeViews {
  Eigen::MatrixXd top;
  Eigen::MatrixXd front;
  Eigen::MatrixXd side;
};

VolumeViews project_views(const CVector& volume, const GridDims& grid);

void write_matrix(const std::filesystem::path& path, const CMatrix& m);
CMatrix read_matrix(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, const CVector& v);
CVector read_vector(const std::filesystem::path& path);

inline constexpr const char* kTraceCsvHeader = "iter,objective,primal_residual,dual_residual,elapsed_seconds";

/// Streams trace rows to a CSV file as they arrive. The header is written on open.
class TraceCsvWriter {
 public:
  explicit TraceCsvWriter(const std::filesystem::path& path);
  ~TraceCsvWriter();
  TraceCsvWriter(const TraceCsvWriter&) = delete;
  TraceCsvWriter& operator=(const TraceCsvWriter&) = delete;

  void append(const TraceRecord& record);
  /// Flushes and closes; throws IoError if any write failed.
  void close();

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
};

void write_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path);
ConvergenceTrace read_trace_csv(const std::filesystem::path& path);

/// Textual form used by the CSV writer: 17 significant digits, enough to round-trip a double.
std::string format_real(double x);

void write_view_pgm(const Eigen::MatrixXd& view, const std::filesystem::path& path);

}  // namespace clns
