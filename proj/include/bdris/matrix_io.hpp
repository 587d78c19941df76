#pragma once

// Complex-matrix CSV snapshots for debugging and regression comparisons.
// Layout: one text row per matrix row, real/imag interleaved
// ("re,im,re,im,..."), 17 significant digits so a write/read round trip is
// value-exact.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "bdris/channel.hpp"

namespace bdris {

inline void write_matrix_csv(std::ostream& os, const CMat& matrix) {
  char buf[64];
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      const auto z = matrix(r, c);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", z.real(), z.imag());
      os << (c ? "," : "") << buf;
    }
    os << "\n";
  }
}

inline void write_matrix_csv(const std::string& path, const CMat& matrix) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  write_matrix_csv(os, matrix);
}

inline CMat read_matrix_csv(std::istream& is) {
  std::vector<std::vector<std::complex<double>>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::complex<double>> row;
    std::istringstream ls(line);
    std::string field;
    double re = 0.0;
    bool have_re = false;
    while (std::getline(ls, field, ',')) {
      const double v = std::stod(field);
      if (have_re) {
        row.emplace_back(re, v);
        have_re = false;
      } else {
        re = v;
        have_re = true;
      }
    }
    if (have_re) throw std::runtime_error("read_matrix_csv: odd field count");
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("read_matrix_csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return CMat(0, 0);
  CMat out(rows.size(), rows.front().size());
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = rows[r][c];
  return out;
}

inline CMat read_matrix_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_matrix_csv: cannot open " + path);
  return read_matrix_csv(is);
}

}  // namespace bdris
