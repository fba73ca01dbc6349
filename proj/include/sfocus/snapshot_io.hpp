#pragma once

// CSV and SFQ1 binary snapshot files.
// SFQ1 layout: "SFQ1", u64 n, then n pairs (f64 Re, f64 Im), all little-endian.

#include <sfocus/errors.hpp>
#include <sfocus/grid.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <span>
#include <string>
#include <vector>

namespace sfocus {

namespace detail {
template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    std::reverse(b.begin(), b.end());
    std::memcpy(&v, b.data(), sizeof(T));
  }
  return v;
}
template <class T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw StructureError("SFQ1: truncated file");
  return to_little(v);
}
} // namespace detail

inline void write_sfq1(std::ostream& os, std::span<const cplx> values) {
  os.write("SFQ1", 4);
  detail::put<std::uint64_t>(os, values.size());
  for (auto z : values) {
    detail::put<double>(os, z.real());
    detail::put<double>(os, z.imag());
  }
}

inline void write_sfq1(const std::filesystem::path& path, std::span<const cplx> values) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_sfq1(os, values);
}

inline std::vector<cplx> read_sfq1(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SFQ1", 4) != 0) throw StructureError("SFQ1: bad magic");
  const auto n = detail::get<std::uint64_t>(is);
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t j = 0; j < n; ++j) {
    const double re = detail::get<double>(is);
    const double im = detail::get<double>(is);
    out.emplace_back(re, im);
  }
  return out;
}

inline std::vector<cplx> read_sfq1(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return read_sfq1(is);
}

/// Columns x, re, im, abs, arg with a header row.
inline void write_field_csv(std::ostream& os, const ComplexField1D& f) {
  os << "x,re,im,abs,arg\n" << std::setprecision(17);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto z = f.values[j];
    os << f.grid.x(j) << ',' << z.real() << ',' << z.imag() << ',' << std::abs(z) << ','
       << std::arg(z) << '\n';
  }
}

inline void write_field_csv(const std::filesystem::path& path, const ComplexField1D& f) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_field_csv(os, f);
}

} // namespace sfocus
