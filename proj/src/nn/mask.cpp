#include "nds/nn/mask.hpp"

#include <algorithm>
#include <numeric>

#include "nds/common/error.hpp"

namespace nds::nn {

std::size_t BitMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t BitMask::row_count(std::size_t r) const noexcept {
  const auto first = bits_.begin() + static_cast<std::ptrdiff_t>(r * cols_);
  return static_cast<std::size_t>(
      std::count(first, first + static_cast<std::ptrdiff_t>(cols_), std::uint8_t{1}));
}

std::vector<std::uint8_t> BitMask::pack() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return out;
}

BitMask BitMask::unpack(std::size_t rows, std::size_t cols, const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() != (rows * cols + 7) / 8) throw TruncatedError("mask payload size mismatch");
  BitMask m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i)
    m.bits_[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return m;
}

std::string BitMask::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (std::uint8_t b : pack()) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

BitMask BitMask::from_hex(std::size_t rows, std::size_t cols, const std::string& hex) {
  if (hex.size() % 2 != 0) throw FormatError("mask hex string has odd length");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw FormatError("invalid hex digit in mask");
  };
  std::vector<std::uint8_t> bytes(hex.size() / 2);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return unpack(rows, cols, bytes);
}

}  // namespace nds::nn
