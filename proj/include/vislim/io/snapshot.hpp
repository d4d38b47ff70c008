#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/field.hpp"

namespace vislim::io {

inline constexpr char kSnapshotMagic[8] = {'N', 'S', 'F', 'L', 'D', '1', '\0', '\0'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 8 + 4 + 4 + 4 + 8 * 4 + 1 + 8 + 8;

namespace detail {

template <class T>
void put_le(std::vector<char>& buf, T value) {
  char b[sizeof(T)];
  std::memcpy(b, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  buf.insert(buf.end(), b, b + sizeof(T));
}

template <class T>
T get_le(const char* p) {
  char b[sizeof(T)];
  std::memcpy(b, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace detail

/// Serialized NSFLD1 bytes of a velocity field.
inline std::vector<char> encode_snapshot(const VelocityField& vel) {
  const auto& d = vel.domain();
  std::vector<char> buf(kSnapshotMagic, kSnapshotMagic + 8);
  buf.reserve(kSnapshotHeaderBytes + 16 * d.size());
  detail::put_le<std::uint32_t>(buf, kSnapshotVersion);
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(d.Nx));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(d.Ny));
  detail::put_le<double>(buf, d.Lx);
  detail::put_le<double>(buf, d.H);
  detail::put_le<double>(buf, vel.time());
  detail::put_le<double>(buf, vel.nu);
  detail::put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(d.bc));
  detail::put_le<double>(buf, d.beta);
  detail::put_le<double>(buf, d.alpha0);
  for (double x : vel.u.data()) detail::put_le<double>(buf, x);
  for (double x : vel.v.data()) detail::put_le<double>(buf, x);
  return buf;
}

/// Parses NSFLD1 bytes.  `what` names the source in error messages.
inline VelocityField decode_snapshot(const std::vector<char>& buf, const std::string& what = "snapshot") {
  auto fail = [&](const std::string& msg, std::size_t off) -> IoError {
    return IoError(what + ": " + msg + " at byte offset " + std::to_string(off));
  };
  if (buf.size() < 8) throw fail("truncated magic", buf.size());
  if (std::memcmp(buf.data(), kSnapshotMagic, 8) != 0) throw fail("magic mismatch (not NSFLD1)", 0);
  if (buf.size() < kSnapshotHeaderBytes) throw fail("truncated header", buf.size());
  const char* p = buf.data() + 8;
  const auto version = detail::get_le<std::uint32_t>(p);
  if (version != kSnapshotVersion)
    throw IoError(what + ": unsupported version " + std::to_string(version) + " (expected " +
                  std::to_string(kSnapshotVersion) + ")");
  DomainSpec d;
  d.Nx = static_cast<int>(detail::get_le<std::uint32_t>(p + 4));
  d.Ny = static_cast<int>(detail::get_le<std::uint32_t>(p + 8));
  d.Lx = detail::get_le<double>(p + 12);
  d.H = detail::get_le<double>(p + 20);
  const double time = detail::get_le<double>(p + 28);
  const double nu = detail::get_le<double>(p + 36);
  const auto bc = detail::get_le<std::uint8_t>(p + 44);
  d.beta = detail::get_le<double>(p + 45);
  d.alpha0 = detail::get_le<double>(p + 53);
  if (bc > 1) throw fail("invalid boundary-condition tag " + std::to_string(bc), 8 + 44);
  d.bc = static_cast<BcKind>(bc);
  if (auto probs = d.problems(); !probs.empty()) throw fail("invalid header: " + probs.front(), 8);
  const std::size_t n = d.size();
  const std::size_t need = kSnapshotHeaderBytes + 16 * n;
  if (buf.size() < need) throw fail("truncated payload (expected " + std::to_string(need) + " bytes)", buf.size());
  if (buf.size() > need) throw fail("trailing bytes after payload", need);
  VelocityField vel(d, nu, time);
  const char* q = buf.data() + kSnapshotHeaderBytes;
  for (std::size_t k = 0; k < 2 * n; ++k) {
    const double x = detail::get_le<double>(q + 8 * k);
    if (!std::isfinite(x)) throw fail("non-finite payload value", kSnapshotHeaderBytes + 8 * k);
    (k < n ? vel.u.data()[k] : vel.v.data()[k - n]) = x;
  }
  return vel;
}

inline std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline void save_snapshot(const std::filesystem::path& path, const VelocityField& vel) {
  auto b = encode_snapshot(vel);
  write_file(path, std::string(b.begin(), b.end()));
}

inline VelocityField load_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(read_file(path), path.string());
}

}  // namespace vislim::io
