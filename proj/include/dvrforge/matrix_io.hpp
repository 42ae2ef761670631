#pragma once

// CSV and DVR1 binary serialization.
//
// DVR1 layout (little endian):
//   "DVR1" | u32 N | u32 tag length | tag bytes | N*N f64, row major

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "dvrforge/error.hpp"
#include "dvrforge/format.hpp"
#include "dvrforge/linalg.hpp"
#include "dvrforge/quadrature.hpp"

namespace dvrforge {

inline void write_csv(std::ostream& os, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << shortest_repr(m(i, j));
    }
    os << '\n';
  }
}

inline Matrix read_csv_matrix(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        r.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("read_csv_matrix: not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && r.size() != rows.front().size()) throw ShapeError("read_csv_matrix: ragged rows");
    rows.push_back(std::move(r));
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

/// index,node,weight with 17 significant digits.
inline void write_quadrature_csv(std::ostream& os, const Quadrature& q) {
  os << "index,node,weight\n";
  for (std::size_t k = 0; k < q.n_points; ++k)
    os << k << ',' << repr_digits(q.nodes[k], 17) << ',' << repr_digits(q.weights[k], 17) << '\n';
}

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), sizeof(T))) throw IoError("DVR1: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace detail

struct Dvr1Record {
  std::string tag;
  Matrix entries;
};

inline void write_dvr1(std::ostream& os, const Matrix& m, const std::string& tag) {
  if (m.rows() != m.cols()) throw ShapeError("DVR1: matrix must be square");
  os.write("DVR1", 4);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(tag.size()));
  os.write(tag.data(), static_cast<std::streamsize>(tag.size()));
  for (double v : m.data()) detail::put_le<double>(os, v);
  if (!os) throw IoError("DVR1: write failed");
}

inline Dvr1Record read_dvr1(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "DVR1", 4) != 0) throw IoError("DVR1: bad magic");
  const auto n = detail::get_le<std::uint32_t>(is);
  const auto len = detail::get_le<std::uint32_t>(is);
  if (len > (1u << 20)) throw IoError("DVR1: implausible tag length");
  Dvr1Record r;
  r.tag.resize(len);
  if (len && !is.read(r.tag.data(), len)) throw IoError("DVR1: truncated tag");
  r.entries = Matrix(n, n);
  for (double& v : r.entries.data()) v = detail::get_le<double>(is);
  return r;
}

inline void save_dvr1(const std::string& path, const Matrix& m, const std::string& tag) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_dvr1(os, m, tag);
}

inline Dvr1Record load_dvr1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_dvr1(is);
}

}  // namespace dvrforge
