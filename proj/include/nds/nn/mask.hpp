#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nds::nn {

// Boolean connectivity matrix of a sparsely connected layer (rows = outputs).
class BitMask {
 public:
  BitMask() = default;
  BitMask(std::size_t rows, std::size_t cols, bool fill = false)
      : rows_(rows), cols_(cols), bits_(rows * cols, fill ? 1 : 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { bits_[r * cols_ + c] = v ? 1 : 0; }

  std::size_t count() const noexcept;
  std::size_t row_count(std::size_t r) const noexcept;

  // Row-major, MSB-first bit packing, ceil(rows * cols / 8) bytes.
  std::vector<std::uint8_t> pack() const;
  static BitMask unpack(std::size_t rows, std::size_t cols, const std::vector<std::uint8_t>& bytes);
  std::string to_hex() const;
  static BitMask from_hex(std::size_t rows, std::size_t cols, const std::string& hex);

  bool operator==(const BitMask&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace nds::nn
