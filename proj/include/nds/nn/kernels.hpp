#pragma once

#include <cstddef>
#include <span>

#include "nds/common/parallel.hpp"

// Compute kernels of the layer kit. Every kernel has a serial reference path
// and an OpenMP path; each output element is accumulated by one thread in the
// same order on both paths, so the results are bitwise identical.
namespace nds::nn::kernels {

// y[s, o] = b[o] + sum_i w[o, i] x[s, i]
template <typename T>
void dense_forward(std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y, std::size_t batch, std::size_t in, std::size_t out, Exec exec);

// dw[o, i] = sum_s dy[s, o] x[s, i]; db[o] = sum_s dy[s, o]; dx[s, i] = sum_o dy[s, o] w[o, i].
// dx may be empty to skip the input gradient.
template <typename T>
void dense_backward(std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                    std::span<T> dw, std::span<T> db, std::span<T> dx, std::size_t batch,
                    std::size_t in, std::size_t out, Exec exec);

struct ConvShape {
  std::size_t batch;
  std::size_t height;
  std::size_t in_channels;
  std::size_t out_channels;
  std::size_t filter;
  std::size_t pad_before;
};

// y[s, h, co] = b[co] + sum_k sum_ci w[co, k, ci] x[s, h - pad_before + k, ci]
template <typename T>
void conv1d_forward(std::span<const T> x, std::span<const T> w, std::span<const T> b,
                    std::span<T> y, const ConvShape& shape, Exec exec);

template <typename T>
void conv1d_backward(std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                     std::span<T> dw, std::span<T> db, std::span<T> dx, const ConvShape& shape,
                     Exec exec);

// In-place ReLU on values; the backward form zeroes dy where y <= 0.
template <typename T>
void relu_forward(std::span<T> y, Exec exec);
template <typename T>
void relu_backward(std::span<const T> y, std::span<T> dy, Exec exec);

}  // namespace nds::nn::kernels
