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

// Jamming-aided secrecy with full-duplex receivers.
//
// In every direction the receiving node radiates jamming noise of power P_J
// while it decodes; it suffers rho * g_AB * P_J of residual self-interference,
// the eavesdropper suffers g_JE * P_J and cannot cancel it. The secrecy rate
// is the Gaussian wiretap difference of logs, clamped at zero.

#ifndef FDX_SECRECY_HPP
#define FDX_SECRECY_HPP

#include "fdx/channel.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fdx
{

struct WiretapLink
{
    double info_power = 1.0;  ///< transmitter power p_A
    double jam_power = 0.0;   ///< receiver jamming power p_J
    double gain_bob = 1.0;    ///< transmitter -> legitimate receiver
    double gain_eve = 1.0;    ///< transmitter -> eavesdropper
    double gain_jam_eve = 1.0; ///< jamming receiver -> eavesdropper
    double rho = 0.0;         ///< residual SI gain at the legitimate receiver
    double noise_power = 1.0;
};

/// max(0, log2(1 + pA gB / (s2 + rho pJ)) - log2(1 + pA gE / (s2 + gJE pJ))).
double oneway_secrecy_rate(const WiretapLink &link);

/// True if some finite P_J >= 0 makes the one-way secrecy rate positive. The
/// positivity condition is affine in P_J, so this is gB > gE or gB gJE > gE rho.
bool oneway_positive_for_some_jamming(const WiretapLink &link);

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

double distance(Point a, Point b);

struct SecrecyScenario
{
    Point alice{-0.5, 0.0};
    Point bob{0.5, 0.0};
    PathLossModel pathloss;
    double noise_power = 1.0;
    double power_a = 1.0;
    double power_b = 1.0;
    double jam_power = 1.0;
    /// Residual SI gain normalised by the legitimate link gain.
    double rho = 0.5;

    void validate() const;
};

/// Eavesdropper channel gains for both directions.
struct EveGains
{
    double a_to_eve_info;  ///< A->B direction: info gain at Eve
    double b_to_eve_jam;   ///< A->B direction: jamming gain at Eve
    double b_to_eve_info;  ///< B->A direction
    double a_to_eve_jam;   ///< B->A direction
};

EveGains pathloss_eve_gains(const SecrecyScenario &scn, Point eve);

/// The two directional links of a scenario for given Eve gains and jamming power.
WiretapLink link_a_to_b(const SecrecyScenario &scn, const EveGains &eve, double jam_power);
WiretapLink link_b_to_a(const SecrecyScenario &scn, const EveGains &eve, double jam_power);

/// S_xy = (S_A->B + S_B->A) / 2 with the scenario's jamming power.
double avg_secrecy(const SecrecyScenario &scn, Point eve);
double avg_secrecy(const SecrecyScenario &scn, const EveGains &eve, double jam_power);

struct RegionGrid
{
    double x_min = -2.0;
    double x_max = 2.0;
    double y_min = -2.0;
    double y_max = 2.0;
    std::size_t nx = 101;
    std::size_t ny = 101;

    void validate() const;
    Point cell(std::size_t ix, std::size_t iy) const;
    std::size_t size() const { return nx * ny; }
};

enum class CellClass
{
    PositiveSecrecy,
    ZeroForAllJamming
};

struct RegionCell
{
    Point eve;
    CellClass cls = CellClass::ZeroForAllJamming;
    double best_rate = 0.0;
    double best_jam_power = 0.0;
    /// Closed-form verdict of the large-P_J criterion for the cell.
    bool analytic_positive = false;
};

struct RegionMap
{
    RegionGrid grid;
    std::vector<RegionCell> cells; ///< row-major, index iy * nx + ix
    std::vector<Point> analytic_disagreements;

    std::size_t zero_count() const;
};

inline constexpr double positivity_threshold = 1e-9;

/// {0} followed by `count` log-spaced values on [1e-2, 1e4].
std::vector<double> default_jam_ladder(std::size_t count = 25);

/// Per cell, maximise S_xy over the candidate jamming powers, then refine by
/// golden-section search in log P_J around the best candidate. The scenario's
/// own jam_power is ignored. Cells are evaluated in parallel.
RegionMap positivity_map(const SecrecyScenario &scn, const RegionGrid &grid, std::span<const double> candidates);

/// rho(d) = absolute_si_gain / pathloss_gain(d): the legitimate gain falls with
/// distance while the SI gain does not, so rho grows with d.
std::vector<double> rho_vs_distance(double absolute_si_gain, std::span<const double> distances,
                                    const PathLossModel &pathloss);

// --- per-subcarrier allocation ---

struct SubcarrierSet
{
    std::vector<double> g_ab;
    std::vector<double> g_ae;
    std::vector<double> g_be;
    std::vector<double> rho;
    double noise_power = 1.0;
    double total_info_power = 1.0;
    double total_jam_power = 1.0;

    std::size_t size() const { return g_ab.size(); }
    void validate() const;
};

struct PowerAllocation
{
    std::vector<double> info;
    std::vector<double> jam;
};

/// Exponential (Rayleigh power) gains with the given means.
SubcarrierSet sample_subcarriers(std::uint64_t seed, std::size_t count, double mean_ab, double mean_ae,
                                 double mean_be, double mean_rho, double noise_power, double total_info_power,
                                 double total_jam_power);

double subcarrier_secrecy(const SubcarrierSet &set, std::size_t k, double info_power, double jam_power);
double total_secrecy(const SubcarrierSet &set, const PowerAllocation &alloc);
PowerAllocation uniform_allocation(const SubcarrierSet &set);

struct AllocationResult
{
    PowerAllocation allocation;
    double secrecy_rate = 0.0;
    /// Objective after each outer iteration; non-decreasing.
    std::vector<double> trace;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Alternating block maximisation: jamming powers with information powers
/// fixed, then information powers with jamming fixed, each block solved by
/// bisection on the power price with per-subcarrier golden-section searches.
/// A block update is kept only if it does not lower the objective.
AllocationResult allocate_subcarrier_powers(const SubcarrierSet &set, double tol = 1e-9,
                                            std::size_t max_iters = 200);

/// Classical water-filling of sum log2(1 + p g / s2) under sum p <= total.
std::vector<double> water_filling_powers(std::span<const double> gains, double noise_power, double total);

// --- multi-antenna eavesdropper ---

struct EveAntennaPoint
{
    std::size_t antennas = 1;
    double median_rate = 0.0;
};

/// Eve's combining gains for one fading draw: N i.i.d. CN(0,1) fades on the
/// A->Eve and B->Eve links, MRC on the wanted signal, jamming as noise.
EveGains mrc_eve_gains(const SecrecyScenario &scn, Point eve, std::span<const cplx> fade_a,
                       std::span<const cplx> fade_b);

/// Seed used for trial `trial` at `antennas` Eve antennas. The draw order is
/// fade_a[0..N) then fade_b[0..N), each CN(0,1) as (re, im) with variance 1/2.
std::uint64_t eve_trial_seed(std::uint64_t seed, std::size_t antennas, std::size_t trial);

/// Median over trials of S_xy against an N-antenna eavesdropper.
std::vector<EveAntennaPoint> secrecy_vs_eve_antennas(const SecrecyScenario &scn, Point eve,
                                                     std::span<const std::size_t> antenna_counts,
                                                     std::size_t trials, std::uint64_t seed);

} // namespace fdx

#endif
