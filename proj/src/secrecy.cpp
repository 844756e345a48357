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

#include "fdx/secrecy.hpp"

#include "fdx/golden.hpp"
#include "fdx/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace fdx
{

double oneway_secrecy_rate(const WiretapLink &l)
{
    if (!(l.noise_power > 0.0))
        throw InvalidArgument("oneway_secrecy_rate: noise power must be positive");
    if (l.info_power < 0.0 || l.jam_power < 0.0 || l.gain_bob < 0.0 || l.gain_eve < 0.0 || l.gain_jam_eve < 0.0 ||
        l.rho < 0.0)
        throw InvalidArgument("oneway_secrecy_rate: powers and gains must be non-negative");
    const double bob = std::log2(1.0 + l.info_power * l.gain_bob / (l.noise_power + l.rho * l.jam_power));
    const double eve = std::log2(1.0 + l.info_power * l.gain_eve / (l.noise_power + l.gain_jam_eve * l.jam_power));
    return std::max(0.0, bob - eve);
}

bool oneway_positive_for_some_jamming(const WiretapLink &l)
{
    // SINR_B > SINR_E  <=>  s2 (gB - gE) + pJ (gB gJE - gE rho) > 0, affine in pJ.
    if (!(l.info_power > 0.0))
        return false;
    return l.gain_bob > l.gain_eve || l.gain_bob * l.gain_jam_eve > l.gain_eve * l.rho;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void SecrecyScenario::validate() const
{
    pathloss.validate();
    if (!(noise_power > 0.0))
        throw InvalidArgument("SecrecyScenario: noise power must be positive");
    if (power_a < 0.0 || power_b < 0.0 || jam_power < 0.0)
        throw InvalidArgument("SecrecyScenario: powers must be non-negative");
    if (!(rho >= 0.0))
        throw InvalidArgument("SecrecyScenario: rho must be non-negative");
}

EveGains pathloss_eve_gains(const SecrecyScenario &scn, Point eve)
{
    const double ga = pathloss_gain(scn.pathloss, distance(scn.alice, eve));
    const double gb = pathloss_gain(scn.pathloss, distance(scn.bob, eve));
    return {ga, gb, gb, ga};
}

WiretapLink link_a_to_b(const SecrecyScenario &scn, const EveGains &eve, double jam_power)
{
    const double g_ab = pathloss_gain(scn.pathloss, distance(scn.alice, scn.bob));
    return {scn.power_a, jam_power, g_ab, eve.a_to_eve_info, eve.b_to_eve_jam, scn.rho * g_ab, scn.noise_power};
}

WiretapLink link_b_to_a(const SecrecyScenario &scn, const EveGains &eve, double jam_power)
{
    const double g_ab = pathloss_gain(scn.pathloss, distance(scn.alice, scn.bob));
    return {scn.power_b, jam_power, g_ab, eve.b_to_eve_info, eve.a_to_eve_jam, scn.rho * g_ab, scn.noise_power};
}

double avg_secrecy(const SecrecyScenario &scn, const EveGains &eve, double jam_power)
{
    return 0.5 * (oneway_secrecy_rate(link_a_to_b(scn, eve, jam_power)) +
                  oneway_secrecy_rate(link_b_to_a(scn, eve, jam_power)));
}

double avg_secrecy(const SecrecyScenario &scn, Point eve)
{
    scn.validate();
    return avg_secrecy(scn, pathloss_eve_gains(scn, eve), scn.jam_power);
}

void RegionGrid::validate() const
{
    if (nx < 1 || ny < 1)
        throw InvalidArgument("RegionGrid: at least one cell per axis is required");
    if ((nx > 1 && !(x_max > x_min)) || (ny > 1 && !(y_max > y_min)))
        throw InvalidArgument("RegionGrid: degenerate extents");
}

Point RegionGrid::cell(std::size_t ix, std::size_t iy) const
{
    const double x = nx == 1 ? x_min : x_min + (x_max - x_min) * static_cast<double>(ix) / static_cast<double>(nx - 1);
    const double y = ny == 1 ? y_min : y_min + (y_max - y_min) * static_cast<double>(iy) / static_cast<double>(ny - 1);
    return {x, y};
}

std::size_t RegionMap::zero_count() const
{
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const RegionCell &c) { return c.cls == CellClass::ZeroForAllJamming; }));
}

std::vector<double> default_jam_ladder(std::size_t count)
{
    std::vector<double> ladder{0.0};
    for (std::size_t i = 0; i < count; ++i)
    {
        const double e = count == 1 ? -2.0 : -2.0 + 6.0 * static_cast<double>(i) / static_cast<double>(count - 1);
        ladder.push_back(std::pow(10.0, e));
    }
    return ladder;
}

RegionMap positivity_map(const SecrecyScenario &scn, const RegionGrid &grid, std::span<const double> candidates)
{
    scn.validate();
    grid.validate();
    std::vector<double> ladder(candidates.begin(), candidates.end());
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
    if (ladder.empty() || ladder.front() != 0.0)
        throw InvalidArgument("positivity_map: jamming candidates must include 0");
    if (ladder.front() < 0.0)
        throw InvalidArgument("positivity_map: jamming candidates must be non-negative");

    RegionMap map;
    map.grid = grid;
    map.cells.resize(grid.size());

    parallel_for(grid.size(), [&](std::size_t idx) {
        RegionCell &cell = map.cells[idx];
        cell.eve = grid.cell(idx % grid.nx, idx / grid.nx);
        const EveGains g = pathloss_eve_gains(scn, cell.eve);
        auto rate = [&](double pj) { return avg_secrecy(scn, g, pj); };

        std::size_t best = 0;
        double best_rate = rate(ladder[0]);
        for (std::size_t i = 1; i < ladder.size(); ++i)
        {
            const double r = rate(ladder[i]);
            if (r > best_rate)
            {
                best_rate = r;
                best = i;
            }
        }
        double best_pj = ladder[best];

        if (ladder.size() > 1)
        {
            // Bracket in log10(P_J) around the best candidate; P_J = 0 maps two decades below the first rung.
            auto log_of = [&](std::size_t i) {
                return ladder[i] > 0.0 ? std::log10(ladder[i]) : std::log10(ladder[1]) - 2.0;
            };
            const double lo = log_of(best == 0 ? 0 : best - 1);
            const double hi = log_of(std::min(best + 1, ladder.size() - 1));
            if (hi > lo)
            {
                const auto lm = golden_section_minimize([&](double u) { return -rate(std::pow(10.0, u)); }, lo, hi,
                                                        1e-10);
                if (-lm.value > best_rate)
                {
                    best_rate = -lm.value;
                    best_pj = std::pow(10.0, lm.x);
                }
            }
        }

        cell.best_rate = best_rate;
        cell.best_jam_power = best_pj;
        cell.cls = best_rate > positivity_threshold ? CellClass::PositiveSecrecy : CellClass::ZeroForAllJamming;
        cell.analytic_positive = oneway_positive_for_some_jamming(link_a_to_b(scn, g, 1.0)) ||
                                 oneway_positive_for_some_jamming(link_b_to_a(scn, g, 1.0));
    });

    for (const auto &c : map.cells)
        if (c.analytic_positive != (c.cls == CellClass::PositiveSecrecy))
            map.analytic_disagreements.push_back(c.eve);
    return map;
}

std::vector<double> rho_vs_distance(double absolute_si_gain, std::span<const double> distances,
                                    const PathLossModel &pathloss)
{
    if (!(absolute_si_gain >= 0.0))
        throw InvalidArgument("rho_vs_distance: SI gain must be non-negative");
    std::vector<double> rho;
    rho.reserve(distances.size());
    double prev = 0.0;
    for (double d : distances)
    {
        if (!(d > 0.0) || d <= prev)
            throw InvalidArgument("rho_vs_distance: distances must be positive and strictly ascending");
        prev = d;
        rho.push_back(absolute_si_gain / pathloss_gain(pathloss, d));
    }
    return rho;
}

// --- per-subcarrier allocation ---

void SubcarrierSet::validate() const
{
    const std::size_t k = g_ab.size();
    if (k < 1)
        throw InvalidArgument("SubcarrierSet: at least one subcarrier is required");
    if (g_ae.size() != k || g_be.size() != k || rho.size() != k)
        throw InvalidArgument("SubcarrierSet: per-subcarrier vectors differ in length");
    auto nonneg = [](const std::vector<double> &v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
    };
    if (!nonneg(g_ab) || !nonneg(g_ae) || !nonneg(g_be) || !nonneg(rho))
        throw InvalidArgument("SubcarrierSet: gains must be finite and non-negative");
    if (!(noise_power > 0.0))
        throw InvalidArgument("SubcarrierSet: noise power must be positive");
    if (!(total_info_power > 0.0) || !(total_jam_power > 0.0))
        throw InvalidArgument("SubcarrierSet: power budgets must be positive");
}

SubcarrierSet sample_subcarriers(std::uint64_t seed, std::size_t count, double mean_ab, double mean_ae,
                                 double mean_be, double mean_rho, double noise_power, double total_info_power,
                                 double total_jam_power)
{
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> unit(1.0);
    SubcarrierSet s;
    s.noise_power = noise_power;
    s.total_info_power = total_info_power;
    s.total_jam_power = total_jam_power;
    for (std::size_t k = 0; k < count; ++k)
    {
        s.g_ab.push_back(mean_ab * unit(rng));
        s.g_ae.push_back(mean_ae * unit(rng));
        s.g_be.push_back(mean_be * unit(rng));
        s.rho.push_back(mean_rho * unit(rng));
    }
    s.validate();
    return s;
}

double subcarrier_secrecy(const SubcarrierSet &set, std::size_t k, double info_power, double jam_power)
{
    return oneway_secrecy_rate({info_power, jam_power, set.g_ab[k], set.g_ae[k], set.g_be[k], set.rho[k],
                                set.noise_power});
}

double total_secrecy(const SubcarrierSet &set, const PowerAllocation &alloc)
{
    double s = 0.0;
    for (std::size_t k = 0; k < set.size(); ++k)
        s += subcarrier_secrecy(set, k, alloc.info[k], alloc.jam[k]);
    return s;
}

PowerAllocation uniform_allocation(const SubcarrierSet &set)
{
    const double k = static_cast<double>(set.size());
    return {std::vector<double>(set.size(), set.total_info_power / k),
            std::vector<double>(set.size(), set.total_jam_power / k)};
}

namespace
{

using PricedSolver = std::function<double(std::size_t k, double price)>;

// Bisection on the power price until sum_k p_k(price) <= budget. p_k(price) is
// non-increasing in the price for exact per-subcarrier maximisers.
std::vector<double> solve_priced(std::size_t count, double budget, const PricedSolver &solve)
{
    auto powers_at = [&](double price) {
        std::vector<double> p(count);
        for (std::size_t k = 0; k < count; ++k)
            p[k] = solve(k, price);
        return p;
    };
    auto sum = [](const std::vector<double> &p) {
        double s = 0.0;
        for (double v : p)
            s += v;
        return s;
    };

    std::vector<double> free_p = powers_at(0.0);
    if (sum(free_p) <= budget)
        return free_p;

    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> hi_p = powers_at(hi);
    for (int i = 0; i < 200 && sum(hi_p) > budget; ++i)
    {
        lo = hi;
        hi *= 2.0;
        hi_p = powers_at(hi);
    }
    for (int i = 0; i < 100 && hi - lo > 1e-14 * hi; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        std::vector<double> p = powers_at(mid);
        if (sum(p) > budget)
            lo = mid;
        else
        {
            hi = mid;
            hi_p = std::move(p);
        }
    }
    // Land exactly on the budget where rounding left it slightly short or over.
    const double s = sum(hi_p);
    if (s > budget)
        for (double &v : hi_p)
            v *= budget / s;
    return hi_p;
}

// Maximiser of f(p) - price p on [0, cap]. The coarse log ladder guards
// against non-unimodal jamming responses before the golden-section polish.
double maximize_priced(const std::function<double(double)> &f, double price, double cap, bool unimodal)
{
    auto neg = [&](double p) { return -(f(p) - price * p); };
    if (unimodal)
        return golden_section_minimize(neg, 0.0, cap, 1e-13).x;

    constexpr int rungs = 40;
    std::vector<double> pts{0.0};
    for (int i = 0; i < rungs; ++i)
        pts.push_back(cap * std::pow(10.0, -6.0 + 6.0 * i / (rungs - 1)));
    std::size_t best = 0;
    double best_v = neg(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i)
    {
        const double v = neg(pts[i]);
        if (v < best_v)
        {
            best_v = v;
            best = i;
        }
    }
    const double lo = best == 0 ? 0.0 : pts[best - 1];
    const double hi = pts[std::min(best + 1, pts.size() - 1)];
    const auto lm = golden_section_minimize(neg, lo, hi, 1e-13);
    return lm.value < best_v ? lm.x : pts[best];
}

} // namespace

AllocationResult allocate_subcarrier_powers(const SubcarrierSet &set, double tol, std::size_t max_iters)
{
    set.validate();
    const std::size_t count = set.size();
    AllocationResult res;
    res.allocation = uniform_allocation(set);
    res.secrecy_rate = total_secrecy(set, res.allocation);
    res.trace.push_back(res.secrecy_rate);

    for (std::size_t it = 0; it < max_iters; ++it)
    {
        res.iterations = it + 1;
        const double before = res.secrecy_rate;

        // Jamming block.
        {
            PowerAllocation cand = res.allocation;
            cand.jam = solve_priced(count, set.total_jam_power, [&](std::size_t k, double price) {
                if (!(res.allocation.info[k] > 0.0))
                    return 0.0;
                return maximize_priced(
                    [&](double pj) { return subcarrier_secrecy(set, k, res.allocation.info[k], pj); }, price,
                    set.total_jam_power, false);
            });
            const double v = total_secrecy(set, cand);
            if (v >= res.secrecy_rate)
            {
                res.allocation = std::move(cand);
                res.secrecy_rate = v;
            }
        }

        // Information block: S_k is concave in p_A (or identically zero).
        {
            PowerAllocation cand = res.allocation;
            cand.info = solve_priced(count, set.total_info_power, [&](std::size_t k, double price) {
                const double pj = res.allocation.jam[k];
                const double bob = set.g_ab[k] / (set.noise_power + set.rho[k] * pj);
                const double eve = set.g_ae[k] / (set.noise_power + set.g_be[k] * pj);
                if (!(bob > eve))
                    return 0.0;
                return maximize_priced([&](double pa) { return subcarrier_secrecy(set, k, pa, pj); }, price,
                                       set.total_info_power, true);
            });
            const double v = total_secrecy(set, cand);
            if (v >= res.secrecy_rate)
            {
                res.allocation = std::move(cand);
                res.secrecy_rate = v;
            }
        }

        res.trace.push_back(res.secrecy_rate);
        if (res.secrecy_rate - before <= tol * std::max(std::abs(res.secrecy_rate), 1e-12))
        {
            res.converged = true;
            break;
        }
    }
    return res;
}

std::vector<double> water_filling_powers(std::span<const double> gains, double noise_power, double total)
{
    std::vector<double> inv;
    for (double g : gains)
        inv.push_back(g > 0.0 ? noise_power / g : std::numeric_limits<double>::infinity());
    std::vector<double> sorted;
    for (double v : inv)
        if (std::isfinite(v))
            sorted.push_back(v);
    std::sort(sorted.begin(), sorted.end());
    double level = 0.0;
    double acc = 0.0;
    for (std::size_t n = 1; n <= sorted.size(); ++n)
    {
        acc += sorted[n - 1];
        level = (total + acc) / static_cast<double>(n);
        if (n == sorted.size() || level <= sorted[n])
            break;
    }
    std::vector<double> p;
    for (double v : inv)
        p.push_back(std::isfinite(v) ? std::max(0.0, level - v) : 0.0);
    return p;
}

// --- multi-antenna eavesdropper ---

EveGains mrc_eve_gains(const SecrecyScenario &scn, Point eve, std::span<const cplx> fade_a,
                       std::span<const cplx> fade_b)
{
    if (fade_a.size() != fade_b.size() || fade_a.empty())
        throw InvalidArgument("mrc_eve_gains: fade vectors must be non-empty and equally long");
    const double ga = pathloss_gain(scn.pathloss, distance(scn.alice, eve));
    const double gb = pathloss_gain(scn.pathloss, distance(scn.bob, eve));
    double na = 0.0, nb = 0.0;
    cplx cross{0.0, 0.0};
    for (std::size_t i = 0; i < fade_a.size(); ++i)
    {
        na += std::norm(fade_a[i]);
        nb += std::norm(fade_b[i]);
        cross += std::conj(fade_a[i]) * fade_b[i];
    }
    const double c = std::norm(cross);
    return {ga * na, na > 0.0 ? gb * c / na : 0.0, gb * nb, nb > 0.0 ? ga * c / nb : 0.0};
}

std::uint64_t eve_trial_seed(std::uint64_t seed, std::size_t antennas, std::size_t trial)
{
    return derive_seed(seed, antennas, trial);
}

std::vector<EveAntennaPoint> secrecy_vs_eve_antennas(const SecrecyScenario &scn, Point eve,
                                                     std::span<const std::size_t> antenna_counts,
                                                     std::size_t trials, std::uint64_t seed)
{
    scn.validate();
    if (trials < 1)
        throw InvalidArgument("secrecy_vs_eve_antennas: at least one trial is required");
    for (std::size_t i = 0; i < antenna_counts.size(); ++i)
        if (antenna_counts[i] < 1 || (i > 0 && antenna_counts[i] <= antenna_counts[i - 1]))
            throw InvalidArgument("secrecy_vs_eve_antennas: antenna counts must be positive and ascending");

    std::vector<EveAntennaPoint> out;
    for (std::size_t n : antenna_counts)
    {
        std::vector<double> rates(trials);
        parallel_for(trials, [&](std::size_t t) {
            std::mt19937_64 rng(eve_trial_seed(seed, n, t));
            std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
            std::vector<cplx> fa(n), fb(n);
            for (auto &v : fa)
            {
                const double re = nd(rng);
                const double im = nd(rng);
                v = {re, im};
            }
            for (auto &v : fb)
            {
                const double re = nd(rng);
                const double im = nd(rng);
                v = {re, im};
            }
            rates[t] = avg_secrecy(scn, mrc_eve_gains(scn, eve, fa, fb), scn.jam_power);
        });
        std::sort(rates.begin(), rates.end());
        const std::size_t mid = trials / 2;
        const double median = trials % 2 ? rates[mid] : 0.5 * (rates[mid - 1] + rates[mid]);
        out.push_back({n, median});
    }
    return out;
}

} // namespace fdx
