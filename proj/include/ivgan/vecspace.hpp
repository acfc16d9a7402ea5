// ivgan/vecspace.hpp

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

#ifndef IVGAN_VECSPACE_HPP_
#define IVGAN_VECSPACE_HPP_

#include <cmath>

#include "ivgan/common.hpp"

namespace ivgan {

/// Scales v to unit L2 norm. The zero vector has no direction and is
/// rejected.
inline IVector length_normalize(const IVector& v) {
  check_ivector(v, "length_normalize");
  double n = v.norm();
  if (n == 0.0) throw DataError("cannot normalize zero vector");
  return v / n;
}

/// In-place unit normalization of every row of m.
inline void length_normalize_rows(Mat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double n = m.row(r).norm();
    if (n == 0.0) throw DataError("cannot normalize zero vector");
    m.row(r) /= n;
  }
}

/// 1 - cos(a, b), in [0, 2].
inline double cosine_distance(const IVector& a, const IVector& b) {
  check_ivector(a, "cosine_distance");
  check_ivector(b, "cosine_distance");
  if (a.size() != b.size())
    throw DataError("cosine_distance: dimension mismatch (" +
                    std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw DataError("cosine_distance: zero-norm operand");
  return 1.0 - a.dot(b) / (na * nb);
}

}  // namespace ivgan

#endif  // IVGAN_VECSPACE_HPP_
