// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "atn/numkit/matrix.hpp"
#include "atn/numkit/rng.hpp"

namespace atn {

/// A trainable tensor with a stable, human-readable name ("w_h",
/// "norm_hh.gamma", ...). Gradient sets use the same names in the same order.
struct NamedParam {
  std::string name;
  Matrix* value;
};

struct NamedConstParam {
  std::string name;
  const Matrix* value;
};

/// Uniform(-1/sqrt(cols), 1/sqrt(cols)) initialization of a weight matrix.
Matrix fan_in_uniform(Rng& rng, std::size_t rows, std::size_t cols);

/// Which weight matrix a rescaling applies to.
enum class WeightMatrix { recurrent, input };

}  // namespace atn
