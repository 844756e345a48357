// SPDX-License-Identifier: Apache-2.0
//
// fdxlab - full-duplex radio simulation and optimization toolkit
// Copyright (C) 2026 The fdxlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FDX_SRC_BVLS_HPP
#define FDX_SRC_BVLS_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace fdx::detail
{

struct BvlsResult
{
    Eigen::VectorXd x;
    /// ||b - A x||^2 after each outer iteration, starting with the initial point.
    std::vector<double> objective;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Bounded-variable least squares (Stark & Parker active-set method),
/// min ||b - A x||^2 subject to lo <= x <= hi, starting from x = lo.
/// Subproblems are solved in extended precision by column-pivoted QR on the
/// free columns, which keeps the residual accurate for badly conditioned A.
///
/// Convergence: every variable held at a bound has gradient pointing out of
/// the box, with |gradient_scale * (A^T (b - A x))_j| <= tol as the slack.
BvlsResult bvls(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, const Eigen::VectorXd &lo,
                const Eigen::VectorXd &hi, double tol, double gradient_scale, std::size_t max_iterations);

/// Warm start from x0 (clamped into the box). The objective never rises above
/// its value at x0.
BvlsResult bvls(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, const Eigen::VectorXd &lo,
                const Eigen::VectorXd &hi, const Eigen::VectorXd &x0, double tol, double gradient_scale,
                std::size_t max_iterations);

} // namespace fdx::detail

#endif
