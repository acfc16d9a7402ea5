// ivgan/common.hpp

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

#ifndef IVGAN_COMMON_HPP_
#define IVGAN_COMMON_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ivgan {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// An i-vector: fixed-dimension real embedding, the unit of every
// transformation in this library.
using IVector = Eigen::VectorXd;

// Invalid configuration (bad field values, incompatible options).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or inconsistent data (dimension mismatches, unsatisfiable requests,
// malformed files).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric divergence: a non-finite value showed up where training or
// evaluation cannot continue.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void check_ivector(const IVector& v, const char* what) {
  if (v.size() == 0)
    throw DataError(std::string(what) + ": empty vector");
  if (!v.allFinite())
    throw DataError(std::string(what) + ": non-finite component");
}

}  // namespace ivgan

#endif  // IVGAN_COMMON_HPP_
