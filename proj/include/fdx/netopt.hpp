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

// Full-duplex / half-duplex rate optimisation for a two-node link.
//
// Each node i owns two transmit covariances Q[i][0], Q[i][1], one per time
// slot, under an average power budget (tr Q[i][0] + tr Q[i][1]) / 2 <= P_i.
// Pure half duplex (node 1 in slot 0, node 2 in slot 1) and pure full duplex
// (both nodes in both slots) are two corners of this set.

#ifndef FDX_NETOPT_HPP
#define FDX_NETOPT_HPP

#include "fdx/common.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <vector>

namespace fdx
{

struct MimoLink
{
    Eigen::MatrixXcd h12; ///< node 1 -> node 2, n2 x n1
    Eigen::MatrixXcd h21; ///< node 2 -> node 1, n1 x n2
    Eigen::MatrixXcd h11; ///< SI at node 1, n1 x n1
    Eigen::MatrixXcd h22; ///< SI at node 2, n2 x n2
    double eta = 1.0;     ///< residual SI power scaling
    double noise_power = 1.0;
    double p1 = 1.0;
    double p2 = 1.0;

    Eigen::Index antennas1() const { return h12.cols(); }
    Eigen::Index antennas2() const { return h12.rows(); }
    void validate() const;
};

struct CovarianceSchedule
{
    /// q[node][slot], node 0 is "node 1".
    std::array<std::array<Eigen::MatrixXcd, 2>, 2> q;

    static CovarianceSchedule zeros(const MimoLink &link);
    /// PSD to -1e-9 and average power within budget + 1e-9.
    bool feasible(const MimoLink &link, double tol = 1e-9) const;
    double average_power(std::size_t node) const;
};

/// Rate of one direction in one slot, log2 det(I + H Q_tx H^H (s2 I + eta H_si Q_rx H_si^H)^{-1}).
double link_rate(const Eigen::MatrixXcd &h, const Eigen::MatrixXcd &q_tx, const Eigen::MatrixXcd &h_si,
                 const Eigen::MatrixXcd &q_self, double eta, double noise_power);

/// Sum of both directions, averaged over the two slots (residual SI treated as Gaussian noise).
double pair_sum_rate(const MimoLink &link, const CovarianceSchedule &schedule);

enum class DuplexMode
{
    FullDuplex,
    HalfDuplex
};

struct ModeDecision
{
    DuplexMode mode = DuplexMode::HalfDuplex;
    double fd_rate = 0.0;
    double hd_rate = 0.0;
};

/// Single-antenna mode choice; ties go to half duplex.
ModeDecision select_mode(double p1, double p2, double g12, double g21, double eta, double noise_power);

/// Water-filling covariance for log2 det(I + H Q H^H / s2) under tr Q <= power.
Eigen::MatrixXcd water_filling_covariance(const Eigen::MatrixXcd &h, double noise_power, double power);
double water_filling_rate(const Eigen::MatrixXcd &h, double noise_power, double power);

/// Node 1 alone in slot 0, node 2 alone in slot 1, each water-filling 2 P_i.
CovarianceSchedule half_duplex_schedule(const MimoLink &link);
/// Both nodes water-fill P_i in both slots as if SI were absent.
CovarianceSchedule isolated_schedule(const MimoLink &link);

struct ScheduleResult
{
    CovarianceSchedule schedule;
    double rate = 0.0;
    /// Rate after each accepted iteration of the winning start, non-decreasing.
    std::vector<double> trace;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Projected gradient ascent on all four covariances with Armijo backtracking,
/// started from the half-duplex, isolated and uniform schedules; the best
/// end point wins. Stops when the relative rate gain of an iteration falls
/// below tol. Global optimality is not claimed.
ScheduleResult optimize_schedule(const MimoLink &link, double tol = 1e-10, std::size_t max_iters = 2000);

/// Single start; exposed for tests.
ScheduleResult optimize_schedule_from(const MimoLink &link, const CovarianceSchedule &start, double tol,
                                      std::size_t max_iters);

/// Euclidean projection of a node's two slot covariances onto
/// {Q PSD, tr Q0 + tr Q1 <= 2 P}.
void project_node(Eigen::MatrixXcd &q0, Eigen::MatrixXcd &q1, double power);

/// i.i.d. CN(0,1) channels with the given antenna counts.
MimoLink random_link(std::uint64_t seed, Eigen::Index n1, Eigen::Index n2, double eta, double noise_power,
                     double p1, double p2);

} // namespace fdx

#endif
