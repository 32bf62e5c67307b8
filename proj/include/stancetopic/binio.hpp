#pragma once

// Little-endian primitive I/O for the versioned binary formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "stancetopic/error.hpp"

namespace stancetopic::binio {

template <typename T>
  requires std::is_arithmetic_v<T>
void put(std::ostream &out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts not supported");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

inline void put_bytes(std::ostream &out, const std::string &s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
  requires std::is_arithmetic_v<T>
T get(std::istream &in, const char *what) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw InputError(std::string("truncated binary input reading ") + what);
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

inline std::string get_bytes(std::istream &in, const char *what, std::uint32_t limit = 1u << 28) {
  const auto n = get<std::uint32_t>(in, what);
  if (n > limit) throw InputError(std::string("implausible length reading ") + what);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw InputError(std::string("truncated binary input reading ") + what);
  return s;
}

inline void put_magic(std::ostream &out, const char (&magic)[5], std::uint8_t version) {
  out.write(magic, 4);
  put<std::uint8_t>(out, version);
}

// Reads and checks a 4-byte magic; returns the format version byte.
inline std::uint8_t expect_magic(std::istream &in, const char (&magic)[5], const std::string &source) {
  char buf[4];
  if (!in.read(buf, 4) || std::memcmp(buf, magic, 4) != 0) {
    throw InputError(source + ": bad magic (expected " + std::string(magic, 4) + ")");
  }
  return get<std::uint8_t>(in, "format version");
}

} // namespace stancetopic::binio
