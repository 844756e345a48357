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

// Anti-eavesdropping channel estimation.
//
// K full-duplex users with n antennas each send n x L pilots P_i at the same
// time. User i hears the other K-1 users through the leave-one-out stack
// [P_j]_{j != i}, which has full row rank; an eavesdropper hears the full
// stack, whose rank is (K-1) n < K n. The missing rank leaves a subspace of
// Eve's channel unobservable at any SNR.

#ifndef FDX_ANECE_HPP
#define FDX_ANECE_HPP

#include "fdx/common.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fdx
{

inline constexpr double rank_threshold = 1e-9;

struct PilotBook
{
    std::size_t users = 2;
    std::size_t antennas = 1;
    std::size_t length = 1;
    double power = 1.0; ///< per-user budget: trace(P_i P_i^H) <= length * power
    std::vector<Eigen::MatrixXcd> pilots;

    /// Shapes and power budget only; rank properties are checked by verify_ranks.
    void validate() const;
    Eigen::MatrixXcd stacked() const;
    Eigen::MatrixXcd leave_one_out(std::size_t user) const;
};

/// P_i = A_i Q with a random full-row-rank (K-1)n x L base Q and random
/// n x (K-1)n mixing blocks, resampled until the rank invariants hold and
/// scaled so every user spends its full budget.
PilotBook build_pilots(std::size_t users, std::size_t antennas, std::size_t length, double power,
                       std::uint64_t seed);

/// Same structure, but Q has singular values log-spaced from 1 down to
/// 1/condition.
PilotBook ill_conditioned_pilots(std::size_t users, std::size_t antennas, std::size_t length, double power,
                                 double condition, std::uint64_t seed);

/// Numerical rank: singular values above rank_threshold times the largest.
std::size_t numerical_rank(const Eigen::MatrixXcd &m);

struct RankReport
{
    std::vector<std::size_t> leave_one_out_ranks;
    std::vector<bool> leave_one_out_full;
    std::size_t full_rank = 0;
    bool full_deficient = false;
    std::size_t ambiguity_dimension = 0;

    bool all_ok() const;
};

RankReport verify_ranks(const PilotBook &book);

/// sigma^2 = power * 10^(-snr_db / 10); snr_db = +inf gives exact zero noise.
double noise_variance(const PilotBook &book, double snr_db);

/// Analytic sum over users of the LS error covariance trace per receive
/// antenna, sigma^2 * sum_i trace((P~_i P~_i^H)^-1).
double user_sum_mse(const PilotBook &book, double snr_db);

struct EstimationReport
{
    std::vector<double> snr_db;
    std::vector<double> user_mse_db; ///< mean over users and trials of normalized MSE
    std::vector<double> eve_mse_db;
    double eve_floor = 0.0;          ///< noiseless Eve normalized MSE (linear)
    double user_noiseless_mse = 0.0; ///< noiseless user normalized MSE (linear)
    std::size_t ambiguity_dimension = 0;
    std::size_t trials = 0;
};

/// Monte Carlo over i.i.d. CN(0,1) channels. Every trial also runs in the
/// noiseless limit to give Eve's floor and the users' exact-recovery check.
EstimationReport simulate_estimation(const PilotBook &book, std::size_t eve_antennas,
                                     std::span<const double> snr_db, std::size_t trials, std::uint64_t seed);

struct PilotOptimization
{
    PilotBook book;
    std::vector<double> trace; ///< user_sum_mse of each accepted iterate, starting with the input
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<PilotBook> history; ///< accepted iterates, starting with the input
};

/// Gradient descent on user_sum_mse. Each trial step is truncated to rank
/// (K-1)n by SVD, which re-factors it as A Q, then every user is rescaled to
/// its full budget. A step is accepted only if it lowers the objective and
/// keeps every rank invariant.
PilotOptimization optimize_pilots(const PilotBook &book0, double snr_db, std::size_t max_iters = 500,
                                  double tol = 1e-10);

nlohmann::json to_json(const PilotBook &book);
PilotBook pilots_from_json(const nlohmann::json &j);

} // namespace fdx

#endif
