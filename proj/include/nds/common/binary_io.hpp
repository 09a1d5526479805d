#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "nds/common/error.hpp"

namespace nds::binary {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written as native little-endian");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open for writing: " + path.string());
  }

  void magic(std::string_view m) { out_.write(m.data(), static_cast<std::streamsize>(m.size())); }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  template <typename T>
  void put_span(std::span<const T> values) {
    out_.write(reinterpret_cast<const char*>(values.data()),
               static_cast<std::streamsize>(values.size_bytes()));
  }

  void bytes(std::span<const std::uint8_t> b) {
    out_.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  }

  void finish() {
    out_.flush();
    if (!out_) throw Error("write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw Error("cannot open for reading: " + path.string());
  }

  void expect_magic(std::string_view m) {
    std::string got(m.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (in_.gcount() != static_cast<std::streamsize>(m.size()) || got != m)
      throw BadMagicError("bad magic: expected " + std::string(m));
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value{};
    read_raw(&value, sizeof(T));
    return value;
  }

  template <typename T>
  std::vector<T> get_vector(std::size_t count) {
    if (count > remaining() / sizeof(T)) throw TruncatedError("payload shorter than header claims");
    std::vector<T> values(count);
    read_raw(values.data(), count * sizeof(T));
    return values;
  }

  std::vector<std::uint8_t> get_bytes(std::size_t count) { return get_vector<std::uint8_t>(count); }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  std::size_t remaining() {
    const auto pos = in_.tellg();
    in_.seekg(0, std::ios::end);
    const auto end = in_.tellg();
    in_.seekg(pos);
    return static_cast<std::size_t>(end - pos);
  }

 private:
  void read_raw(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw TruncatedError("unexpected end of file");
  }

  std::ifstream in_;
};

}  // namespace nds::binary
