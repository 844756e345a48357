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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "fdx/anece.hpp"
#include "fdx/blind.hpp"
#include "fdx/experiment.hpp"
#include "fdx/netopt.hpp"
#include "fdx/secrecy.hpp"
#include "fdx/sicancel.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace fdx;

namespace
{

int failures = 0;

void report(int id, bool pass, const std::string &detail)
{
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

class Stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename... Args>
std::string fmt(const char *f, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double worst_after_fit(const ComplexSpectrum &si, const CancellerConfig &cfg, AttenuatorSettings *out = nullptr)
{
    const auto fit = fit_attenuators(si, cfg);
    if (out)
        *out = fit.settings;
    return residual_report(si, canceller_response(cfg, fit.settings)).worst_db;
}

// In-span single-path SI: amplitude 0.5 keeps the target inside what a
// passive [0, 1] canceller can synthesise between adjacent taps.
constexpr double single_path_amplitude = 0.5;

void criterion_1()
{
    const Stopwatch sw;
    const FrequencyGrid grid{2.4e9, 100e6, 201};
    const auto cfg = CancellerConfig::standard(5, grid);
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t cases = 0;
    for (int f = 0; f < 10; ++f)
        for (int ph = 0; ph < 8; ++ph)
        {
            const double delay = (0.05 + 0.1 * f) * cfg.span_s();
            const auto si = frequency_response(
                MultipathChannel::single_path(delay, std::polar(single_path_amplitude, ph * std::numbers::pi / 4)),
                grid);
            worst = std::max(worst, worst_after_fit(si, cfg));
            ++cases;
        }
    const double t = sw.seconds();

    // Reported alongside: a random multipath ensemble and unit-amplitude paths.
    std::vector<double> ens;
    for (std::uint64_t s = 0; s < 100; ++s)
        ens.push_back(worst_after_fit(frequency_response(sample_multipath(derive_seed(1, s), 3, 5e-9, 1.0), grid), cfg));
    std::size_t unit_fail = 0;
    for (int f = 0; f < 10; ++f)
        for (int ph = 0; ph < 8; ++ph)
        {
            const double delay = (0.05 + 0.1 * f) * cfg.span_s();
            const auto si = frequency_response(
                MultipathChannel::single_path(delay, std::polar(1.0, ph * std::numbers::pi / 4)), grid);
            unit_fail += worst_after_fit(si, cfg) > -90.0;
        }
    std::printf("    random 3-tap ensemble (100 draws): median worst %.1f dB, max worst %.1f dB\n", median(ens),
                *std::max_element(ens.begin(), ens.end()));
    std::printf("    unit-amplitude in-span paths failing -90 dB: %zu/80\n", unit_fail);
    report(1, worst <= -90.0 && t < 10.0,
           fmt("N=5 single-path (|a|=0.5, %zu delays x phases) worst residual %.1f dB <= -90 dB in %.2f s", cases,
               worst, t));
}

void criterion_2()
{
    const FrequencyGrid grid;
    std::size_t violations = 0;
    for (std::uint64_t t = 0; t < 100; ++t)
    {
        const auto si = frequency_response(sample_multipath(derive_seed(7, t), 3, 5e-9, 1.0), grid);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n <= 6; ++n)
        {
            const double w = worst_after_fit(si, CancellerConfig::standard(n, grid));
            if (w > prev)
            {
                ++violations;
                std::printf("    violation: trial %llu N=%zu %.2f dB -> %.2f dB\n", static_cast<unsigned long long>(t),
                            n, prev, w);
            }
            prev = w;
        }
    }
    report(2, violations == 0, fmt("worst-case residual non-increasing over N=1..6 on 100 trials: %zu violations",
                                   violations));
}

// Required gap between quantized and unquantized medians. The oracle run of
// this ensemble gave 100/100 failures and a 93.9 dB median gap.
constexpr double quantization_gap_pinned_db = 20.0;

void criterion_3()
{
    const FrequencyGrid grid;
    const auto cfg = CancellerConfig::standard(5, grid);
    const QuantizationSpec q{0.5, -60.0};
    std::size_t fails = 0;
    std::vector<double> exact, quant;
    for (std::uint64_t s = 0; s < 100; ++s)
    {
        std::mt19937_64 rng(derive_seed(3, s));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double delay = u(rng) * cfg.span_s();
        const double phase = 2.0 * std::numbers::pi * u(rng);
        const auto si = frequency_response(MultipathChannel::single_path(delay, std::polar(single_path_amplitude, phase)), grid);
        AttenuatorSettings g(5);
        exact.push_back(worst_after_fit(si, cfg, &g));
        const double wq = residual_report(si, canceller_response(cfg, quantize_settings(g, q))).worst_db;
        quant.push_back(wq);
        fails += wq > -90.0;
    }
    const double gap = median(quant) - median(exact);
    report(3, fails >= 95 && gap >= quantization_gap_pinned_db,
           fmt("0.5 dB steps fail -90 dB in %zu/100 trials; median %.1f dB vs %.1f dB unquantized (gap %.1f dB >= %.0f)",
               fails, median(quant), median(exact), gap, quantization_gap_pinned_db));
}

void criterion_4()
{
    const FrequencyGrid grid;
    double max_err = 0.0, max_rf = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k)
    {
        BlindLoopModel m;
        m.g_config = CancellerConfig::standard(1 + static_cast<std::size_t>(k) % 5, grid);
        m.g = AttenuatorSettings(m.g_config.clusters);
        AttenuatorSettings s(m.g_config.clusters);
        std::vector<Tap> taps;
        for (std::size_t n = 0; n < m.g_config.clusters; ++n)
            for (std::size_t j = 0; j < 4; ++j)
            {
                s.at(n, j) = u(rng);
                taps.push_back({static_cast<double>(n) * m.g_config.large_delay_s +
                                    static_cast<double>(j) * m.g_config.small_delay_s,
                                s.at(n, j)});
            }
        m.h2 = MultipathChannel(taps);
        m.h4 = MultipathChannel::single_path(0.0, 0.5 + u(rng));
        m.h6 = m.h4;
        m.g = fit_attenuators(equivalent_target(m), m.g_config).settings;
        m.tx_noise_power = std::pow(10.0, -3.0 - 4.0 * u(rng));
        const auto f = tx_noise_floor_compare(m, grid);

        // TX noise injected through the SI path, relative to the uncancelled SI.
        const Eigen::VectorXcd si = frequency_response(m.h2, grid).values.cwiseProduct(frequency_response(m.h4, grid).values);
        const double injected = m.tx_noise_power * si.cwiseAbs2().mean();
        const double expected_db = 10.0 * std::log10(injected / f.uncancelled_power);
        max_err = std::max(max_err, std::abs(f.baseband_ref_floor_db - expected_db));

        max_rf = std::max(max_rf, f.rf_tap_floor_db);
    }
    report(4, max_err <= 0.1 && max_rf <= -200.0,
           fmt("baseband floor within %.4f dB of injected TX noise (<= 0.1); post-PA tap floor max %.1f dB (<= -200)",
               max_err, max_rf));
}

BlindLoopModel blind_scenario(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BlindLoopModel m;
    m.g_config = CancellerConfig::standard(1, FrequencyGrid{});
    std::vector<Tap> taps;
    taps.push_back({u(rng) * m.g_config.span_s(), std::polar(0.5, 2.0 * std::numbers::pi * u(rng))});
    for (int k = 0; k < 3; ++k)
        taps.push_back({u(rng) * 1e-8, std::polar(0.5 * std::pow(10.0, (-20.0 - 10.0 * k) / 20.0),
                                                  2.0 * std::numbers::pi * u(rng))});
    m.h2 = MultipathChannel(taps);
    m.g = AttenuatorSettings(1);
    return m;
}

void criterion_5()
{
    double gap_clean = 0.0, gap_noisy = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        auto m = blind_scenario(derive_seed(11, s));
        const double opt = residual_power(m, fit_attenuators(equivalent_target(m), m.g_config).settings);
        const auto clean = blind_tune(m, 50, derive_seed(12, s));
        gap_clean = std::max(gap_clean, 10.0 * std::log10(residual_power(m, clean.settings) / opt));
        m.measurement_samples = 10000;
        const auto noisy = blind_tune(m, 50, derive_seed(12, s));
        m.measurement_samples = BlindLoopModel::noiseless;
        gap_noisy = std::max(gap_noisy, 10.0 * std::log10(residual_power(m, noisy.settings) / opt));
    }
    report(5, gap_clean <= 3.0 && gap_noisy <= 10.0,
           fmt("50 sweeps on 20 scenarios: worst gap %.2f dB noiseless (<= 3), %.2f dB with 1e4 samples (<= 10)",
               gap_clean, gap_noisy));
}

double wf_oracle(const Eigen::MatrixXcd &h, double s2, double p)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
    std::vector<double> g;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        g.push_back(svd.singularValues()[i] * svd.singularValues()[i] / s2);
    double lo = 0.0, hi = p + 1e6;
    for (int it = 0; it < 200; ++it)
    {
        const double mu = 0.5 * (lo + hi);
        double used = 0.0;
        for (double x : g)
            used += std::max(0.0, mu - 1.0 / x);
        (used > p ? hi : lo) = mu;
    }
    double r = 0.0;
    for (double x : g)
        r += std::log2(1.0 + std::max(0.0, lo - 1.0 / x) * x);
    return r;
}

void criterion_6()
{
    const Stopwatch sw;
    double wf_err = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const auto l = random_link(derive_seed(60, s), 2, 2, 0.0, 1.0, 1.0, 1.0);
        const double oracle = wf_oracle(l.h12, 1.0, 1.0) + wf_oracle(l.h21, 1.0, 1.0);
        wf_err = std::max(wf_err, std::abs(optimize_schedule(l).rate - oracle));
    }

    // Single-antenna nodes: simultaneous transmission must vanish.
    double overlap = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const auto l = random_link(derive_seed(61, s), 1, 1, 1e6, 1.0, 1.0, 1.0);
        const auto r = optimize_schedule(l);
        for (std::size_t t = 0; t < 2; ++t)
            overlap = std::max(overlap, std::min(r.schedule.q[0][t].trace().real(), r.schedule.q[1][t].trace().real()));
    }

    double brute_gap = 0.0;
    const int steps = 50;
    for (std::uint64_t s = 0; s < 3; ++s)
    {
        const auto l = random_link(derive_seed(62, s), 1, 1, std::pow(10.0, static_cast<double>(s) - 1.0), 1.0, 1.0, 1.0);
        const double g12 = std::norm(l.h12(0, 0)), g21 = std::norm(l.h21(0, 0));
        const double s11 = std::norm(l.h11(0, 0)), s22 = std::norm(l.h22(0, 0));
        auto rate = [&](double a0, double a1, double b0, double b1) {
            auto slot = [&](double a, double b) {
                return std::log2(1.0 + a * g12 / (1.0 + l.eta * s22 * b)) +
                       std::log2(1.0 + b * g21 / (1.0 + l.eta * s11 * a));
            };
            return 0.5 * (slot(a0, b0) + slot(a1, b1));
        };
        const double h = 2.0 / (steps - 1);
        double brute = 0.0;
        for (int a0 = 0; a0 < steps; ++a0)
            for (int a1 = 0; a0 + a1 < steps; ++a1)
                for (int b0 = 0; b0 < steps; ++b0)
                    for (int b1 = 0; b0 + b1 < steps; ++b1)
                        brute = std::max(brute, rate(a0 * h, a1 * h, b0 * h, b1 * h));
        brute_gap = std::max(brute_gap, std::abs(optimize_schedule(l).rate - brute) / brute);
    }
    const double t = sw.seconds();
    report(6, wf_err <= 1e-6 && overlap < 0.01 && brute_gap <= 0.01 && t < 60.0,
           fmt("eta=0 gap to water-filling %.2e (<= 1e-6); eta=1e6 simultaneous power %.2e (< 1%% of budget); "
               "1x1 vs 50^4 grid %.3f%% (<= 1%%); %.1f s",
               wf_err, overlap, 100.0 * brute_gap, t));
}

void criterion_7()
{
    const Stopwatch sw;
    SecrecyScenario scn;
    const RegionGrid grid{-2.0, 2.0, -2.0, 2.0, 101, 101};
    const auto ladder = default_jam_ladder();
    bool ok = true;
    std::ostringstream summary;
    for (double rho : {0.25, 0.5, 0.9, 1.1, 1.5, 3.0})
    {
        scn.rho = rho;
        const auto map = positivity_map(scn, grid, ladder);
        const std::size_t zeros = map.zero_count();
        const bool want_empty = rho < 1.0;
        const bool good = (zeros == 0) == want_empty && map.analytic_disagreements.empty();
        ok = ok && good;
        summary << " rho=" << rho << ":" << zeros;
        if (want_empty)
            for (const auto &c : map.cells)
                if (c.cls == CellClass::ZeroForAllJamming)
                    std::printf("    counterexample rho=%.2f at (%.3f, %.3f)\n", rho, c.eve.x, c.eve.y);
        for (const auto &p : map.analytic_disagreements)
            std::printf("    analytic disagreement rho=%.2f at (%.3f, %.3f)\n", rho, p.x, p.y);
    }
    const double t = sw.seconds();
    report(7, ok && t < 120.0, fmt("zero-region cells on 101x101 (empty iff rho < 1):%s; %.1f s", summary.str().c_str(), t));
}

void criterion_8()
{
    double worst_rel = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s)
    {
        auto set = sample_subcarriers(derive_seed(80, s), 1, 1.0, 0.5, 0.5, 0.1, 1.0, 2.0, 3.0);
        set.g_ab[0] = std::max(set.g_ab[0], set.g_ae[0] + 0.1);
        double brute = 0.0;
        for (int i = 0; i < 200; ++i)
            for (int j = 0; j < 200; ++j)
                brute = std::max(brute, subcarrier_secrecy(set, 0, set.total_info_power * i / 199.0,
                                                           set.total_jam_power * j / 199.0));
        worst_rel = std::max(worst_rel, std::abs(allocate_subcarrier_powers(set).secrecy_rate - brute) / brute);
    }
    std::size_t beats = 0, monotone = 0;
    for (std::uint64_t s = 0; s < 100; ++s)
    {
        const auto set = sample_subcarriers(derive_seed(81, s), 64, 1.0, 0.5, 0.5, 0.1, 1.0, 64.0, 64.0);
        const auto r = allocate_subcarrier_powers(set);
        beats += r.secrecy_rate >= total_secrecy(set, uniform_allocation(set));
        monotone += std::is_sorted(r.trace.begin(), r.trace.end());
    }
    report(8, worst_rel <= 0.01 && beats == 100 && monotone == 100,
           fmt("K=1 vs 200x200 grid %.3f%% (<= 1%%); K=64 beats uniform %zu/100, monotone traces %zu/100",
               100.0 * worst_rel, beats, monotone));
}

// The oracle run of the nominal scenario gave medians 0.486, 0.262, 0, 0, 0.
constexpr double eve_collapse_threshold = 0.05;

void criterion_9()
{
    SecrecyScenario scn;
    scn.rho = 0.01;
    const std::vector<std::size_t> counts{1, 2, 4, 8, 16};
    const auto r = secrecy_vs_eve_antennas(scn, {0.0, 1.0}, counts, 10000, 9);
    bool trend = r.back().median_rate < r.front().median_rate;
    std::ostringstream s;
    for (std::size_t i = 0; i < r.size(); ++i)
    {
        s << " N=" << r[i].antennas << ":" << fmt("%.4f", r[i].median_rate);
        if (i > 0)
        {
            const double prev = r[i - 1].median_rate, cur = r[i].median_rate;
            trend = trend && (prev > 0.0 ? cur < prev : cur == 0.0);
        }
    }
    report(9, trend && r.back().median_rate < eve_collapse_threshold,
           fmt("median secrecy%s; decreasing until zero, N=16 below %.2f", s.str().c_str(), eve_collapse_threshold));
}

void criterion_10()
{
    const auto book = build_pilots(2, 2, 4, 1.0, 10);
    const std::vector<double> snr{10, 20, 30, 40};
    const auto rep = simulate_estimation(book, 4, snr, 10000, 10);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < snr.size(); ++i)
    {
        sx += snr[i];
        sy += rep.user_mse_db[i];
        sxx += snr[i] * snr[i];
        sxy += snr[i] * rep.user_mse_db[i];
    }
    const double n = static_cast<double>(snr.size());
    const double slope = 10.0 * (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double floor_db = 10.0 * std::log10(rep.eve_floor);
    const double analytic = static_cast<double>(rep.ambiguity_dimension) / 4.0;
    const double floor_err = std::abs(rep.eve_floor - analytic) / analytic;
    const double eve_gap = rep.eve_mse_db.back() - floor_db;
    report(10, std::abs(slope + 10.0) <= 1.0 && std::abs(eve_gap) <= 3.0 && floor_err <= 0.02,
           fmt("user slope %.3f dB/decade; Eve at 40 dB %.2f dB vs floor %.2f dB; floor %.4f vs d/(Kn) = %.4f (%.2f%%)",
               slope, rep.eve_mse_db.back(), floor_db, rep.eve_floor, analytic, 100.0 * floor_err));
}

// Improvement achieved by the oracle run from this condition-1e3 book.
constexpr double pilot_gain_pinned_db = 57.24;

void criterion_11()
{
    const auto book = ill_conditioned_pilots(3, 2, 6, 1.0, 1e3, 11);
    const auto r = optimize_pilots(book, 20.0, 500);
    const double gain = 10.0 * std::log10(r.trace.front() / r.trace.back());
    std::size_t bad = 0;
    for (const auto &h : r.history)
        bad += !verify_ranks(h).all_ok();
    report(11, gain >= 10.0 && std::abs(gain - pilot_gain_pinned_db) <= 0.1 && bad == 0,
           fmt("user-sum-MSE improved %.2f dB (>= 10, pinned %.2f) over %zu accepted iterates, %zu rank failures",
               gain, pilot_gain_pinned_db, r.history.size(), bad));
}

void criterion_12()
{
    std::printf("    not reproducible in software: the hardware result of 50 dB SI reduction over 30 MHz\n"
                "    and every RF measurement figure; the digital transversal filter stands in for them.\n");
    double worst = -std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const auto si = sample_to_fir(sample_multipath(derive_seed(12, s), 4, 50e-9, 1.0), 100e6, 16);
        for (std::size_t delay : {0u, 3u})
        {
            // The SI path is at least as long as the auxiliary one.
            std::vector<cplx> late(delay, cplx{0.0, 0.0});
            late.insert(late.end(), si.begin(), si.end());
            std::vector<cplx> aux(delay + 1, cplx{0.0, 0.0});
            aux.back() = std::polar(0.8, 0.3);
            worst = std::max(worst, design_tdtb(late, aux, si.size()).residual_db);
        }
        const auto aux = sample_to_fir(sample_multipath(derive_seed(13, s), 2, 20e-9, 1.0), 100e6, 4);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t len = 1; len <= 32; ++len)
        {
            const double r = design_tdtb(si, aux, len).residual_ratio;
            monotone = monotone && r <= prev * (1.0 + 1e-9);
            prev = r;
        }
    }
    report(12, worst <= -100.0 && monotone,
           fmt("impulse/delayed-impulse auxiliary worst residual %.1f dB (<= -100); residual non-increasing in length: %s",
               worst, monotone ? "yes" : "no"));
}

void criterion_13()
{
    namespace fs = std::filesystem;
    std::size_t mismatched = 0, files = 0;
    for (const auto &kind : experiment_kinds())
    {
        auto spec = parse_config(R"({"kind": ")" + kind + R"(", "seed": 13})");
        const auto base = fs::temp_directory_path() / ("fdxlab_acceptance_" + kind);
        spec.output_dir = (base / "a").string();
        const auto a = run_experiment(spec);
        spec.output_dir = (base / "b").string();
        const auto b = run_experiment(spec);
        for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i)
        {
            ++files;
            if (i >= a.size() || i >= b.size() || a[i].sha256 != b[i].sha256)
            {
                ++mismatched;
                std::printf("    digest mismatch in %s\n", kind.c_str());
            }
        }
        fs::remove_all(base);
    }
    report(13, mismatched == 0,
           fmt("%zu experiment kinds rerun with identical config and seed: %zu/%zu output digests identical",
               experiment_kinds().size(), files - mismatched, files));
}

} // namespace

int main()
{
    const std::vector<void (*)()> criteria{criterion_1, criterion_2,  criterion_3,  criterion_4, criterion_5,
                                           criterion_6, criterion_7,  criterion_8,  criterion_9, criterion_10,
                                           criterion_11, criterion_12, criterion_13};
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        try
        {
            criteria[i]();
        }
        catch (const std::exception &e)
        {
            report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
