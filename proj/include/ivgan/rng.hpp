// ivgan/rng.hpp

// Copyright 2026  Ivgan Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef IVGAN_RNG_HPP_
#define IVGAN_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ivgan/common.hpp"

namespace ivgan {

// splitmix64 finalizer; used to derive independent sub-seeds from a base
// seed so that the draw order of one component cannot shift another's.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random source. std::mt19937_64 output is pinned by the
// standard, and all distributions are implemented here explicitly, so a
// seed produces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; pairs are cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Vec gaussian_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  // Fills row-major so the stream order is independent of matrix storage.
  Mat gaussian_mat(int rows, int cols) {
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = gaussian();
    return m;
  }

  // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  int uniform_int(int n) {
    if (n <= 0) throw ConfigError("Rng::uniform_int: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  // Fisher-Yates; std::shuffle is implementation-defined, this is not.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      int j = uniform_int(i + 1);
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ivgan

#endif  // IVGAN_RNG_HPP_
