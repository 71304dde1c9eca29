// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_TYPES_HPP_
#define ASTOI_TYPES_HPP_

#include <Eigen/Core>

namespace astoi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace astoi

#endif  // ASTOI_TYPES_HPP_
