// tests/test_vecspace.cpp

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

#include <catch2/catch.hpp>

#include "ivgan/rng.hpp"
#include "ivgan/vecspace.hpp"

using namespace ivgan;

TEST_CASE("length_normalize basic values") {
  IVector v(2);
  v << 3.0, 4.0;
  IVector n = length_normalize(v);
  REQUIRE(n(0) == Approx(0.6).margin(1e-15));
  REQUIRE(n(1) == Approx(0.8).margin(1e-15));
  REQUIRE(n.norm() == Approx(1.0).margin(1e-12));
}

TEST_CASE("length_normalize is identity on unit vectors") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    IVector u = rng.gaussian_vec(7);
    u /= u.norm();
    IVector n = length_normalize(u);
    REQUIRE((n - u).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("length_normalize rejects the zero vector") {
  IVector z = IVector::Zero(2);
  REQUIRE_THROWS_AS(length_normalize(z), DataError);
  REQUIRE_THROWS_WITH(length_normalize(z),
                      Catch::Contains("cannot normalize zero vector"));
}

TEST_CASE("cosine_distance endpoint values") {
  Rng rng(5);
  IVector a = rng.gaussian_vec(9);
  REQUIRE(cosine_distance(a, a) == Approx(0.0).margin(1e-12));
  REQUIRE(cosine_distance(a, IVector(-a)) == Approx(2.0).margin(1e-12));

  IVector e1 = IVector::Zero(4), e2 = IVector::Zero(4);
  e1(0) = 2.5;
  e2(2) = -0.3;
  REQUIRE(cosine_distance(e1, e2) == Approx(1.0).margin(1e-12));
}

TEST_CASE("cosine_distance input validation") {
  IVector a = IVector::Ones(3), b = IVector::Ones(4);
  REQUIRE_THROWS_AS(cosine_distance(a, b), DataError);
  IVector z = IVector::Zero(3);
  REQUIRE_THROWS_AS(cosine_distance(a, z), DataError);
}

TEST_CASE("normalization and cosine distance are scale invariant") {
  Rng rng(42);
  for (int t = 0; t < 100; ++t) {
    int d = 2 + rng.uniform_int(16);
    IVector v = rng.gaussian_vec(d);
    if (v.norm() == 0.0) continue;
    double s = 0.01 + 10.0 * rng.uniform();
    IVector n1 = length_normalize(v);
    IVector n2 = length_normalize(IVector(s * v));
    REQUIRE((n1 - n2).cwiseAbs().maxCoeff() < 1e-12);

    IVector w = rng.gaussian_vec(d);
    if (w.norm() == 0.0) continue;
    double tscale = 0.01 + 10.0 * rng.uniform();
    double d1 = cosine_distance(v, w);
    double d2 = cosine_distance(IVector(s * v), IVector(tscale * w));
    REQUIRE(d1 == Approx(d2).margin(1e-12));
    REQUIRE(d1 == Approx(cosine_distance(w, v)).margin(1e-12));
    REQUIRE(d1 >= 0.0);
    REQUIRE(d1 <= 2.0 + 1e-15);
  }
}
