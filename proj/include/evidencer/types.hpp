/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_TYPES_HPP
#define EVIDENCER_TYPES_HPP

#include <Eigen/Dense>

namespace evidencer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// models x voxels matrix of log model evidences (or Acc/Com components).
using LmeMatrix = Matrix;

} // namespace evidencer

#endif
