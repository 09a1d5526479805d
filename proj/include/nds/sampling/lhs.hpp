#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "nds/common/matrix.hpp"

namespace nds::sampling {

// Keyed pseudo-random bijection on [0, n): a balanced Feistel network over
// the next power-of-four domain with cycle walking. Lets any row of a Latin
// hypercube design be produced without materializing the permutation.
class IndexPermutation {
 public:
  IndexPermutation(std::uint64_t n, std::uint64_t key);
  std::uint64_t operator()(std::uint64_t i) const;
  std::uint64_t size() const noexcept { return n_; }

 private:
  std::uint64_t n_;
  std::uint64_t key_;
  unsigned half_bits_;
};

// Row `index` of an n_samples x out.size() Latin hypercube design: coordinate
// d lies in stratum perm_d(index) of [0, 1), jittered uniformly inside it.
void lhs_row(std::uint64_t index, std::uint64_t n_samples, std::uint64_t seed,
             std::span<double> out);

// Full design. Each column has exactly one value in every stratum
// [j/n, (j+1)/n). Deterministic in seed.
MatrixD lhs_sample(std::size_t n_samples, std::size_t n_dims, std::uint64_t seed);

}  // namespace nds::sampling
