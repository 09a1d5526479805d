#include "nds/nn/kernels.hpp"

#include <algorithm>
#include <cstdint>

namespace nds::nn::kernels {

namespace {

inline bool par(Exec exec) { return exec == Exec::parallel; }

}  // namespace

template <typename T>
void dense_forward(std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y, std::size_t batch, std::size_t in, std::size_t out, Exec exec) {
  const auto n = static_cast<std::int64_t>(batch);
#pragma omp parallel for schedule(static) if (par(exec))
  for (std::int64_t s = 0; s < n; ++s) {
    const T* xs = x.data() + s * in;
    T* ys = y.data() + s * out;
    for (std::size_t o = 0; o < out; ++o) {
      const T* wo = w.data() + o * in;
      T acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += wo[i] * xs[i];
      ys[o] = acc;
    }
  }
}

template <typename T>
void dense_backward(std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                    std::span<T> dw, std::span<T> db, std::span<T> dx, std::size_t batch,
                    std::size_t in, std::size_t out, Exec exec) {
  const auto n_out = static_cast<std::int64_t>(out);
#pragma omp parallel for schedule(static) if (par(exec))
  for (std::int64_t o = 0; o < n_out; ++o) {
    T* dwo = dw.data() + o * in;
    std::fill(dwo, dwo + in, T{0});
    T bacc{0};
    for (std::size_t s = 0; s < batch; ++s) {
      const T g = dy[s * out + o];
      bacc += g;
      const T* xs = x.data() + s * in;
      for (std::size_t i = 0; i < in; ++i) dwo[i] += g * xs[i];
    }
    db[o] = bacc;
  }
  if (dx.empty()) return;
  const auto n = static_cast<std::int64_t>(batch);
#pragma omp parallel for schedule(static) if (par(exec))
  for (std::int64_t s = 0; s < n; ++s) {
    T* dxs = dx.data() + s * in;
    std::fill(dxs, dxs + in, T{0});
    for (std::size_t o = 0; o < out; ++o) {
      const T g = dy[s * out + o];
      const T* wo = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) dxs[i] += g * wo[i];
    }
  }
}

template <typename T>
void conv1d_forward(std::span<const T> x, std::span<const T> w, std::span<const T> b,
                    std::span<T> y, const ConvShape& sh, Exec exec) {
  const std::size_t H = sh.height, ci_n = sh.in_channels, co_n = sh.out_channels, f = sh.filter;
  const auto n = static_cast<std::int64_t>(sh.batch);
#pragma omp parallel for schedule(static) if (par(exec))
  for (std::int64_t s = 0; s < n; ++s) {
    const T* xs = x.data() + s * H * ci_n;
    T* ys = y.data() + s * H * co_n;
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t co = 0; co < co_n; ++co) {
        T acc = b[co];
        for (std::size_t k = 0; k < f; ++k) {
          const auto hh = static_cast<std::int64_t>(h + k) - static_cast<std::int64_t>(sh.pad_before);
          if (hh < 0 || hh >= static_cast<std::int64_t>(H)) continue;
          const T* xr = xs + hh * ci_n;
          const T* wr = w.data() + (co * f + k) * ci_n;
          for (std::size_t ci = 0; ci < ci_n; ++ci) acc += wr[ci] * xr[ci];
        }
        ys[h * co_n + co] = acc;
      }
    }
  }
}

template <typename T>
void conv1d_backward(std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                     std::span<T> dw, std::span<T> db, std::span<T> dx, const ConvShape& sh,
                     Exec exec) {
  const std::size_t H = sh.height, ci_n = sh.in_channels, co_n = sh.out_channels, f = sh.filter;
  const auto pad = static_cast<std::int64_t>(sh.pad_before);
  const auto n_co = static_cast<std::int64_t>(co_n);
#pragma omp parallel for schedule(static) if (par(exec))
  for (std::int64_t co = 0; co < n_co; ++co) {
    T* dwc = dw.data() + co * f * ci_n;
    std::fill(dwc, dwc + f * ci_n, T{0});
    T bacc{0};
    for (std::size_t s = 0; s < sh.batch; ++s) {
      const T* xs = x.data() + s * H * ci_n;
      const T* dys = dy.data() + s * H * co_n;
      for (std::size_t h = 0; h < H; ++h) {
        const T g = dys[h * co_n + co];
        bacc += g;
        for (std::size_t k = 0; k < f; ++k) {
          const auto hh = static_cast<std::int64_t>(h + k) - pad;
          if (hh < 0 || hh >= static_cast<std::int64_t>(H)) continue;
          const T* xr = xs + hh * ci_n;
          T* dwr = dwc + k * ci_n;
          for (std::size_t ci = 0; ci < ci_n; ++ci) dwr[ci] += g * xr[ci];
        }
      }
    }
    db[co] = bacc;
  }
  if (dx.empty()) return;
  const auto n = static_cast<std::int64_t>(sh.batch);
#pragma omp parallel for schedule(static) if (par(exec))
  for (std::int64_t s = 0; s < n; ++s) {
    T* dxs = dx.data() + s * H * ci_n;
    const T* dys = dy.data() + s * H * co_n;
    std::fill(dxs, dxs + H * ci_n, T{0});
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t k = 0; k < f; ++k) {
        const auto hh = static_cast<std::int64_t>(h + k) - pad;
        if (hh < 0 || hh >= static_cast<std::int64_t>(H)) continue;
        T* dxr = dxs + hh * ci_n;
        for (std::size_t co = 0; co < co_n; ++co) {
          const T g = dys[h * co_n + co];
          const T* wr = w.data() + (co * f + k) * ci_n;
          for (std::size_t ci = 0; ci < ci_n; ++ci) dxr[ci] += g * wr[ci];
        }
      }
    }
  }
}

template <typename T>
void relu_forward(std::span<T> y, Exec exec) {
  const auto n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static) if (par(exec))
  for (std::int64_t i = 0; i < n; ++i)
    if (!(y[i] > T{0})) y[i] = T{0};
}

template <typename T>
void relu_backward(std::span<const T> y, std::span<T> dy, Exec exec) {
  const auto n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static) if (par(exec))
  for (std::int64_t i = 0; i < n; ++i)
    if (!(y[i] > T{0})) dy[i] = T{0};
}

#define NDS_KERNELS(T)                                                                          \
  template void dense_forward<T>(std::span<const T>, std::span<const T>, std::span<const T>,    \
                                 std::span<T>, std::size_t, std::size_t, std::size_t, Exec);    \
  template void dense_backward<T>(std::span<const T>, std::span<const T>, std::span<const T>,   \
                                  std::span<T>, std::span<T>, std::span<T>, std::size_t,        \
                                  std::size_t, std::size_t, Exec);                              \
  template void conv1d_forward<T>(std::span<const T>, std::span<const T>, std::span<const T>,   \
                                  std::span<T>, const ConvShape&, Exec);                        \
  template void conv1d_backward<T>(std::span<const T>, std::span<const T>, std::span<const T>,  \
                                   std::span<T>, std::span<T>, std::span<T>, const ConvShape&,  \
                                   Exec);                                                       \
  template void relu_forward<T>(std::span<T>, Exec);                                            \
  template void relu_backward<T>(std::span<const T>, std::span<T>, Exec);

NDS_KERNELS(float)
NDS_KERNELS(double)

#undef NDS_KERNELS

}  // namespace nds::nn::kernels
