#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nds/common/matrix.hpp"

namespace nds::nn {

// Batched volume: batch x height x channels, channels fastest. Vectors are
// height x 1 volumes.
template <typename T>
struct Tensor {
  std::size_t batch = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(std::size_t b, std::size_t h, std::size_t c, T fill = T{})
      : batch(b), height(h), channels(c), data(b * h * c, fill) {}

  std::size_t sample_size() const noexcept { return height * channels; }
  T& at(std::size_t s, std::size_t h, std::size_t c) { return data[(s * height + h) * channels + c]; }
  const T& at(std::size_t s, std::size_t h, std::size_t c) const {
    return data[(s * height + h) * channels + c];
  }
  std::span<T> sample(std::size_t s) { return {data.data() + s * sample_size(), sample_size()}; }
  std::span<const T> sample(std::size_t s) const {
    return {data.data() + s * sample_size(), sample_size()};
  }
  bool operator==(const Tensor&) const = default;
};

// Rows of a matrix as a batch of height x 1 tensors, converting precision.
template <typename T>
Tensor<T> tensor_from_rows(const MatrixD& m) {
  Tensor<T> t(m.rows(), m.cols(), 1);
  for (std::size_t i = 0; i < m.size(); ++i) t.data[i] = static_cast<T>(m.data()[i]);
  return t;
}

template <typename T>
Tensor<T> tensor_from_rows(const MatrixD& m, std::span<const std::size_t> rows) {
  Tensor<T> t(rows.size(), m.cols(), 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = m.row(rows[r]);
    auto dst = t.sample(r);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] = static_cast<T>(src[c]);
  }
  return t;
}

template <typename T>
MatrixD rows_from_tensor(const Tensor<T>& t) {
  MatrixD m(t.batch, t.sample_size());
  for (std::size_t i = 0; i < t.data.size(); ++i) m.data()[i] = static_cast<double>(t.data[i]);
  return m;
}

}  // namespace nds::nn
