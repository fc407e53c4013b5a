#pragma once

// Binary field snapshots.
//
// Layout (all little-endian):
//   bytes  0..7   magic "RKDVSNAP"
//   bytes  8..15  half width L   (float64)
//   bytes 16..23  point count N  (uint64)
//   bytes 24..31  time t         (float64)
//   bytes 32..35  flux tag       (uint32; 0 none, 1 f=u^2, 2 f=u^2/2)
//   bytes 36..39  reserved, zero
//   then N float64 values.

#include "rkdv/grid.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace rkdv {

enum class FluxTag : std::uint32_t { none = 0, square = 1, half_square = 2 };

struct Snapshot {
  Field field;
  FluxTag flux = FluxTag::none;
};

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

template <class T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

inline constexpr std::array<char, 8> kSnapshotMagic{'R', 'K', 'D', 'V', 'S', 'N', 'A', 'P'};
inline constexpr std::size_t kSnapshotHeader = 40;

}  // namespace detail

inline std::string encode_snapshot(const Field& f, FluxTag flux = FluxTag::none) {
  std::string out(detail::kSnapshotMagic.begin(), detail::kSnapshotMagic.end());
  out.reserve(detail::kSnapshotHeader + 8 * f.size());
  detail::put_le(out, f.grid().half_width());
  detail::put_le(out, static_cast<std::uint64_t>(f.size()));
  detail::put_le(out, f.time());
  detail::put_le(out, static_cast<std::uint32_t>(flux));
  detail::put_le(out, std::uint32_t{0});
  for (double v : f.values()) detail::put_le(out, v);
  return out;
}

inline Snapshot decode_snapshot(std::string_view bytes) {
  if (bytes.size() < detail::kSnapshotHeader ||
      std::memcmp(bytes.data(), detail::kSnapshotMagic.data(), detail::kSnapshotMagic.size()) != 0)
    throw std::runtime_error("snapshot: bad magic or truncated header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const double L = detail::get_le<double>(p + 8);
  const auto n = detail::get_le<std::uint64_t>(p + 16);
  const double t = detail::get_le<double>(p + 24);
  const auto tag = detail::get_le<std::uint32_t>(p + 32);
  if (tag > 2) throw std::runtime_error("snapshot: unknown flux tag " + std::to_string(tag));
  if (bytes.size() != detail::kSnapshotHeader + 8 * n)
    throw std::runtime_error("snapshot: payload size does not match N = " + std::to_string(n));
  std::vector<double> values(n);
  for (std::size_t j = 0; j < n; ++j) values[j] = detail::get_le<double>(p + detail::kSnapshotHeader + 8 * j);
  return Snapshot{Field(GridSpec(L, n), std::move(values), t), static_cast<FluxTag>(tag)};
}

inline void write_snapshot(const std::filesystem::path& path, const Field& f, FluxTag flux = FluxTag::none) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("snapshot: cannot open for writing: " + path.string());
  const auto bytes = encode_snapshot(f, flux);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("snapshot: write failed: " + path.string());
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace rkdv
