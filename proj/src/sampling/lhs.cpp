#include "nds/sampling/lhs.hpp"

#include <bit>
#include <cmath>

#include "nds/common/error.hpp"
#include "nds/common/rng.hpp"

namespace nds::sampling {

namespace {

constexpr int kFeistelRounds = 6;

}  // namespace

IndexPermutation::IndexPermutation(std::uint64_t n, std::uint64_t key) : n_(n), key_(key) {
  if (n == 0) throw InvalidArgument("IndexPermutation: empty domain");
  const unsigned bits = n <= 1 ? 0u : static_cast<unsigned>(std::bit_width(n - 1));
  half_bits_ = (bits + 1) / 2;
}

std::uint64_t IndexPermutation::operator()(std::uint64_t i) const {
  if (half_bits_ == 0) return 0;
  const std::uint64_t mask = (std::uint64_t{1} << half_bits_) - 1;
  std::uint64_t x = i;
  do {
    std::uint64_t left = x >> half_bits_;
    std::uint64_t right = x & mask;
    for (int r = 0; r < kFeistelRounds; ++r) {
      const std::uint64_t f = hash_keys({key_, static_cast<std::uint64_t>(r), right}) & mask;
      const std::uint64_t next = left ^ f;
      left = right;
      right = next;
    }
    x = (left << half_bits_) | right;
  } while (x >= n_);
  return x;
}

void lhs_row(std::uint64_t index, std::uint64_t n_samples, std::uint64_t seed,
             std::span<double> out) {
  if (index >= n_samples) throw InvalidArgument("lhs_row: index outside design");
  const double below_one = std::nextafter(1.0, 0.0);
  for (std::size_t d = 0; d < out.size(); ++d) {
    const IndexPermutation perm(n_samples, hash_keys({seed, 0x5151, d}));
    const std::uint64_t stratum = perm(index);
    const double jitter = to_unit(hash_keys({seed, 0x7a7a, d, index}));
    const double v = (static_cast<double>(stratum) + jitter) / static_cast<double>(n_samples);
    out[d] = std::min(v, below_one);
  }
}

MatrixD lhs_sample(std::size_t n_samples, std::size_t n_dims, std::uint64_t seed) {
  if (n_samples == 0 || n_dims == 0) throw InvalidArgument("lhs_sample: empty design");
  MatrixD out(n_samples, n_dims);
  for (std::size_t i = 0; i < n_samples; ++i) lhs_row(i, n_samples, seed, out.row(i));
  return out;
}

}  // namespace nds::sampling
