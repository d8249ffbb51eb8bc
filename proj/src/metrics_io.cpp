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

#include "clns/metrics_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace clns {

namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");
static_assert(sizeof(Complex) == 2 * sizeof(double));

constexpr char kMatrixMagic[8] = {'C', 'L', 'N', 'S', 'M', 'A', 'T', '1'};
constexpr char kVectorMagic[8] = {'C', 'L', 'N', 'S', 'V', 'E', 'C', '1'};

void put_u64(std::string& buf, std::uint64_t x) {
  char bytes[8];
  std::memcpy(bytes, &x, 8);
  buf.append(bytes, 8);
}

std::uint64_t get_u64(const std::string& buf, std::size_t offset) {
  std::uint64_t x = 0;
  std::memcpy(&x, buf.data() + offset, 8);
  return x;
}

void write_file(const std::filesystem::path& path, const std::string& header, const void* payload,
                std::size_t payload_bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  if (payload_bytes > 0) out.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Validates magic and dimensions, returns the number of complex values in the payload.
std::uint64_t check_layout(const std::string& buf, const char (&magic)[8], std::size_t n_dims,
                           std::uint64_t* dims, const std::filesystem::path& path) {
  const std::string name = path.string();
  if (buf.size() < 8) throw FormatError(name + ": truncated magic", buf.size());
  if (std::memcmp(buf.data(), magic, 8) != 0) {
    throw FormatError(name + ": bad magic, expected \"" + std::string(magic, 8) + "\"", 0);
  }
  const std::size_t header = 8 + 8 * n_dims;
  if (buf.size() < header) throw FormatError(name + ": truncated header", buf.size());

  constexpr std::uint64_t kMaxIndex = static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max());
  std::uint64_t count = 1;
  for (std::size_t d = 0; d < n_dims; ++d) {
    dims[d] = get_u64(buf, 8 + 8 * d);
    if (dims[d] > kMaxIndex || (dims[d] != 0 && count > (kMaxIndex / 16) / dims[d])) {
      throw FormatError(name + ": dimension overflow", 8 + 8 * d);
    }
    count *= dims[d];
  }
  const std::uint64_t expected = count * 16;
  const std::uint64_t available = buf.size() - header;
  if (available < expected) {
    throw FormatError(name + ": truncated payload, expected " + std::to_string(expected) + " bytes", buf.size());
  }
  if (available > expected) throw FormatError(name + ": trailing bytes after payload", header + expected);
  return count;
}

}  // namespace

double nmse(const CVector& u_est, const CVector& u_true) {
  if (u_est.size() != u_true.size()) {
    throw ShapeError("nmse: length " + std::to_string(u_est.size()) + " vs " + std::to_string(u_true.size()));
  }
  const double ref = u_true.squaredNorm();
  if (ref == 0.0) throw UndefinedMetricError("nmse: reference vector is zero");
  return (u_est - u_true).squaredNorm() / ref;
}

SupportMetrics support_metrics(const CVector& u_est, const CVector& u_true, double rel_threshold) {
  if (u_est.size() != u_true.size()) {
    throw ShapeError("support_metrics: length " + std::to_string(u_est.size()) + " vs " +
                     std::to_string(u_true.size()));
  }
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) {
    throw ParameterError("support_metrics: rel_threshold must lie in (0, 1)");
  }
  const double peak = u_est.size() > 0 ? u_est.cwiseAbs().maxCoeff() : 0.0;
  const double cut = rel_threshold * peak;
  std::size_t n_est = 0, n_true = 0, n_hit = 0;
  for (Eigen::Index p = 0; p < u_est.size(); ++p) {
    const double mag = std::abs(u_est[p]);
    const bool est = mag > 0.0 && mag >= cut;
    const bool truth = u_true[p] != Complex(0.0, 0.0);
    n_est += est;
    n_true += truth;
    n_hit += est && truth;
  }
  SupportMetrics m;
  m.precision = n_est > 0 ? static_cast<double>(n_hit) / static_cast<double>(n_est) : (n_true == 0 ? 1.0 : 0.0);
  m.recall = n_true > 0 ? static_cast<double>(n_hit) / static_cast<double>(n_true) : 1.0;
  return m;
}

VolumeViews project_views(const CVector& volume, const GridDims& grid) {
  if (static_cast<std::size_t>(volume.size()) != grid.count()) {
    throw ShapeError("project_views: volume has " + std::to_string(volume.size()) + " voxels, grid has " +
                     std::to_string(grid.count()));
  }
  const auto nx = static_cast<Eigen::Index>(grid.nx);
  const auto ny = static_cast<Eigen::Index>(grid.ny);
  const auto nz = static_cast<Eigen::Index>(grid.nz);
  VolumeViews views{Eigen::MatrixXd::Zero(ny, nx), Eigen::MatrixXd::Zero(nz, nx), Eigen::MatrixXd::Zero(nz, ny)};
  for (Eigen::Index z = 0; z < nz; ++z)
    for (Eigen::Index y = 0; y < ny; ++y)
      for (Eigen::Index x = 0; x < nx; ++x) {
        const double mag = std::abs(volume[x + nx * (y + ny * z)]);
        views.top(y, x) = std::max(views.top(y, x), mag);
        views.front(z, x) = std::max(views.front(z, x), mag);
        views.side(z, y) = std::max(views.side(z, y), mag);
      }
  return views;
}

void write_matrix(const std::filesystem::path& path, const CMatrix& m) {
  std::string header(kMatrixMagic, 8);
  put_u64(header, static_cast<std::uint64_t>(m.rows()));
  put_u64(header, static_cast<std::uint64_t>(m.cols()));
  write_file(path, header, m.data(), static_cast<std::size_t>(m.size()) * sizeof(Complex));
}

CMatrix read_matrix(const std::filesystem::path& path) {
  const std::string buf = slurp(path);
  std::uint64_t dims[2];
  const std::uint64_t count = check_layout(buf, kMatrixMagic, 2, dims, path);
  CMatrix m(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
  if (count > 0) std::memcpy(m.data(), buf.data() + 24, count * sizeof(Complex));
  return m;
}

void write_vector(const std::filesystem::path& path, const CVector& v) {
  std::string header(kVectorMagic, 8);
  put_u64(header, static_cast<std::uint64_t>(v.size()));
  write_file(path, header, v.data(), static_cast<std::size_t>(v.size()) * sizeof(Complex));
}

CVector read_vector(const std::filesystem::path& path) {
  const std::string buf = slurp(path);
  std::uint64_t dims[1];
  const std::uint64_t count = check_layout(buf, kVectorMagic, 1, dims, path);
  CVector v(static_cast<Eigen::Index>(dims[0]));
  if (count > 0) std::memcpy(v.data(), buf.data() + 16, count * sizeof(Complex));
  return v;
}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

TraceCsvWriter::TraceCsvWriter(const std::filesystem::path& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw IoError("cannot open " + path.string() + " for writing");
  std::fputs(kTraceCsvHeader, file_);
  std::fputc('\n', file_);
}

TraceCsvWriter::~TraceCsvWriter() {
  if (file_) std::fclose(file_);
}

void TraceCsvWriter::append(const TraceRecord& r) {
  if (!file_) throw IoError("trace writer for " + path_.string() + " is closed");
  const std::string line = std::to_string(r.iter) + ',' + format_real(r.objective) + ',' +
                           format_real(r.primal_residual) + ',' + format_real(r.dual_residual) + ',' +
                           format_real(r.elapsed_seconds) + '\n';
  std::fwrite(line.data(), 1, line.size(), file_);
}

void TraceCsvWriter::close() {
  if (!file_) return;
  const bool bad = std::ferror(file_) != 0;
  const bool close_failed = std::fclose(file_) != 0;
  file_ = nullptr;
  if (bad || close_failed) throw IoError("write failed: " + path_.string());
}

void write_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path) {
  TraceCsvWriter w(path);
  for (const auto& r : trace) w.append(r);
  w.close();
}

ConvergenceTrace read_trace_csv(const std::filesystem::path& path) {
  const std::string buf = slurp(path);
  const std::string name = path.string();
  ConvergenceTrace trace;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < buf.size()) {
    std::size_t eol = buf.find('\n', pos);
    if (eol == std::string::npos) eol = buf.size();
    const std::string_view line(buf.data() + pos, eol - pos);
    if (!header_seen) {
      if (line != kTraceCsvHeader) throw FormatError(name + ": unexpected trace header", pos);
      header_seen = true;
    } else if (!line.empty()) {
      TraceRecord r;
      const char* p = line.data();
      const char* end = line.data() + line.size();
      auto fail = [&] { return FormatError(name + ": malformed trace row", pos + (p - line.data())); };
      auto res = std::from_chars(p, end, r.iter);
      if (res.ec != std::errc{} || res.ptr == end || *res.ptr != ',') throw fail();
      p = res.ptr + 1;
      double* fields[] = {&r.objective, &r.primal_residual, &r.dual_residual, &r.elapsed_seconds};
      for (std::size_t f = 0; f < 4; ++f) {
        res = std::from_chars(p, end, *fields[f]);
        if (res.ec != std::errc{}) throw fail();
        const bool last = f == 3;
        if (last ? res.ptr != end : (res.ptr == end || *res.ptr != ',')) throw fail();
        p = last ? res.ptr : res.ptr + 1;
      }
      trace.push_back(r);
    }
    pos = eol + 1;
  }
  if (!header_seen) throw FormatError(name + ": missing trace header", 0);
  return trace;
}

void write_view_pgm(const Eigen::MatrixXd& view, const std::filesystem::path& path) {
  if (view.size() == 0) throw ParameterError("write_view_pgm: view is empty");
  if (!view.allFinite() || view.minCoeff() < 0.0) {
    throw ParameterError("write_view_pgm: view values must be finite and >= 0");
  }
  const double peak = view.maxCoeff();
  std::string out = "P5\n" + std::to_string(view.cols()) + " " + std::to_string(view.rows()) + "\n65535\n";
  out.reserve(out.size() + 2 * static_cast<std::size_t>(view.size()));
  for (Eigen::Index r = 0; r < view.rows(); ++r)
    for (Eigen::Index c = 0; c < view.cols(); ++c) {
      double scaled = peak > 0.0 ? std::floor(view(r, c) / peak * 65535.0 + 0.5) : 0.0;
      const auto px = static_cast<std::uint16_t>(std::clamp(scaled, 0.0, 65535.0));
      out.push_back(static_cast<char>(px >> 8));
      out.push_back(static_cast<char>(px & 0xff));
    }
  write_file(path, out, nullptr, 0);
}

}  // namespace clns
