#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace robustik::detail {

/// Halton sequence with per-dimension random digit permutations (digit 0 is
/// kept fixed so the radical inverse stays inside [0, 1)).
class ScrambledHalton {
 public:
  ScrambledHalton(std::size_t dimensions, std::uint64_t seed) {
    static constexpr std::array<unsigned, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                                         23, 29, 31, 37, 41, 43, 47, 53,
                                                         59, 61, 67, 71, 73, 79, 83, 89};
    if (dimensions > kPrimes.size()) {
      throw std::invalid_argument("scrambled Halton supports at most 24 dimensions");
    }
    std::mt19937_64 rng(seed);
    for (std::size_t d = 0; d < dimensions; ++d) {
      const unsigned base = kPrimes[d];
      std::vector<unsigned> perm(base);
      std::iota(perm.begin(), perm.end(), 0u);
      std::shuffle(perm.begin() + 1, perm.end(), rng);
      bases_.push_back(base);
      perms_.push_back(std::move(perm));
    }
  }

  /// Point `index` (0-based) in [0, 1)^dimensions.
  [[nodiscard]] std::vector<double> point(std::uint64_t index) const {
    std::vector<double> out(bases_.size());
    for (std::size_t d = 0; d < bases_.size(); ++d) {
      const unsigned base = bases_[d];
      const auto& perm = perms_[d];
      double inv = 1.0 / base;
      double scale = inv;
      double value = 0.0;
      for (std::uint64_t i = index + 1; i > 0; i /= base) {
        value += perm[i % base] * scale;
        scale *= inv;
      }
      out[d] = value;
    }
    return out;
  }

 private:
  std::vector<unsigned> bases_;
  std::vector<std::vector<unsigned>> perms_;
};

}  // namespace robustik::detail
