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

#include "fdx/blind.hpp"

#include "fdx/golden.hpp"

#include <random>

namespace fdx
{

void BlindLoopModel::validate() const
{
    g_config.validate();
    if (g.clusters() != g_config.clusters)
        throw InvalidArgument("BlindLoopModel: G settings do not match the canceller config");
    g.validate();
    if (!(tx_noise_power >= 0.0))
        throw InvalidArgument("BlindLoopModel: TX noise power must be non-negative");
    if (measurement_samples < 1)
        throw InvalidArgument("BlindLoopModel: at least one measurement sample is required");
}

namespace
{

struct LoopSpectra
{
    Eigen::VectorXcd s1, s3, s4, si, path; // si = H4 H2, path = H6 H5
};

LoopSpectra loop_spectra(const BlindLoopModel &model, const FrequencyGrid &grid)
{
    LoopSpectra s;
    s.s1 = frequency_response(model.h1, grid).values;
    s.s3 = frequency_response(model.h3, grid).values;
    s.s4 = frequency_response(model.h4, grid).values;
    s.si = s.s4.cwiseProduct(frequency_response(model.h2, grid).values);
    s.path = frequency_response(model.h6, grid).values.cwiseProduct(frequency_response(model.h5, grid).values);
    return s;
}

// Residual power as a weighted least-squares functional of the flattened gains:
// P(beta) = (1/M) ||e - B beta||^2 + remote, on real-stacked data.
class ResidualFunctional
{
public:
    ResidualFunctional(const BlindLoopModel &model, bool remote_active)
    {
        const LoopSpectra s = loop_spectra(model, model.g_config.grid);
        const Eigen::MatrixXcd basis = canceller_basis(model.g_config);
        const Eigen::Index m = basis.rows();
        const Eigen::VectorXd weight = (s.s1.cwiseAbs2().array() + model.tx_noise_power).sqrt().matrix();

        b_.resize(2 * m, basis.cols());
        e_.resize(2 * m);
        for (Eigen::Index i = 0; i < m; ++i)
        {
            const Eigen::RowVectorXcd row = weight[i] * s.path[i] * basis.row(i);
            b_.row(i) = row.real();
            b_.row(m + i) = row.imag();
            const cplx e = weight[i] * s.si[i];
            e_[i] = e.real();
            e_[m + i] = e.imag();
        }
        inv_m_ = 1.0 / static_cast<double>(m);
        remote_ = remote_active ? s.s4.cwiseProduct(s.s3).cwiseAbs2().mean() : 0.0;
    }

    double operator()(const Eigen::VectorXd &beta) const
    {
        return inv_m_ * (e_ - b_ * beta).squaredNorm() + remote_;
    }

private:
    Eigen::MatrixXd b_;
    Eigen::VectorXd e_;
    double inv_m_ = 1.0;
    double remote_ = 0.0;
};

} // namespace

NoiseFloors tx_noise_floor_compare(const BlindLoopModel &model, const FrequencyGrid &grid)
{
    model.validate();
    CancellerConfig cfg = model.g_config;
    cfg.grid = grid;
    const LoopSpectra s = loop_spectra(model, grid);
    const Eigen::VectorXcd c = canceller_response(cfg, model.g).values;
    const Eigen::VectorXcd d = s.si - s.path.cwiseProduct(c);
    const Eigen::ArrayXd drive = s.s1.cwiseAbs2().array();
    const double noise = model.tx_noise_power;

    NoiseFloors out;
    out.uncancelled_power = (s.si.cwiseAbs2().array() * (drive + noise)).mean();
    const double baseband = (d.cwiseAbs2().array() * drive + noise * s.si.cwiseAbs2().array()).mean();
    const double rf_tap = (d.cwiseAbs2().array() * (drive + noise)).mean();
    if (out.uncancelled_power > 0.0)
    {
        out.baseband_ref_floor_db = power_db(baseband / out.uncancelled_power);
        out.rf_tap_floor_db = power_db(rf_tap / out.uncancelled_power);
    }
    return out;
}

ComplexSpectrum equivalent_target(const BlindLoopModel &model)
{
    model.validate();
    const LoopSpectra s = loop_spectra(model, model.g_config.grid);
    if ((s.path.array().abs() == 0.0).any())
        throw InvalidArgument("equivalent_target: cancellation path has a spectral null");
    return {model.g_config.grid, s.si.cwiseQuotient(s.path)};
}

double residual_power(const BlindLoopModel &model, const AttenuatorSettings &settings, bool remote_active)
{
    model.validate();
    if (settings.clusters() != model.g_config.clusters)
        throw InvalidArgument("residual_power: settings do not match the canceller config");
    return ResidualFunctional(model, remote_active)(settings.to_vector());
}

BlindTuneResult blind_tune(const BlindLoopModel &model, std::size_t sweeps, std::uint64_t seed,
                           const BlindTuneOptions &options)
{
    model.validate();
    const ResidualFunctional exact(model, options.remote_active);
    const bool noisy = model.measurement_samples != BlindLoopModel::noiseless;
    std::mt19937_64 rng(seed);
    // The mean of S i.i.d. |r|^2 samples of a circular Gaussian r is P * Gamma(S, 1/S).
    std::gamma_distribution<double> sample_mean(static_cast<double>(noisy ? model.measurement_samples : 1),
                                                noisy ? 1.0 / static_cast<double>(model.measurement_samples) : 1.0);

    BlindTuneResult out;
    auto measure = [&](const Eigen::VectorXd &beta) {
        ++out.measurements;
        const double p = exact(beta);
        return noisy ? p * sample_mean(rng) : p;
    };

    Eigen::VectorXd cur = model.g.to_vector();
    const Eigen::Index n = cur.size();
    double f_cur = measure(cur);
    out.trace.push_back(f_cur);

    auto try_accept = [&](const Eigen::VectorXd &candidate, double f_candidate) {
        if (noisy)
            f_cur = measure(cur);
        if (f_candidate < f_cur)
        {
            cur = candidate;
            f_cur = f_candidate;
        }
    };

    for (std::size_t sweep = 0; sweep < sweeps; ++sweep)
    {
        const Eigen::VectorXd start = cur;
        for (Eigen::Index k = 0; k < n; ++k)
        {
            Eigen::VectorXd probe = cur;
            const auto lm = golden_section_minimize(
                [&](double t) {
                    probe[k] = t;
                    return measure(probe);
                },
                0.0, 1.0, options.line_tol);
            probe[k] = lm.x;
            try_accept(probe, lm.value);
        }

        if (options.pattern_move)
        {
            const Eigen::VectorXd dir = cur - start;
            if (dir.squaredNorm() > 0.0)
            {
                // Feasible interval of t for cur + t dir inside the unit box.
                double t_lo = -std::numeric_limits<double>::infinity();
                double t_hi = std::numeric_limits<double>::infinity();
                for (Eigen::Index j = 0; j < n; ++j)
                {
                    if (dir[j] > 0.0)
                    {
                        t_lo = std::max(t_lo, -cur[j] / dir[j]);
                        t_hi = std::min(t_hi, (1.0 - cur[j]) / dir[j]);
                    }
                    else if (dir[j] < 0.0)
                    {
                        t_lo = std::max(t_lo, (1.0 - cur[j]) / dir[j]);
                        t_hi = std::min(t_hi, -cur[j] / dir[j]);
                    }
                }
                const Eigen::VectorXd base = cur;
                auto along = [&](double t) { return (base + t * dir).cwiseMax(0.0).cwiseMin(1.0).eval(); };
                const auto lm = golden_section_minimize([&](double t) { return measure(along(t)); }, t_lo, t_hi,
                                                        options.line_tol);
                try_accept(along(lm.x), lm.value);
            }
        }

        if (noisy)
            f_cur = measure(cur);
        out.trace.push_back(f_cur);
    }

    out.settings = AttenuatorSettings::from_vector(cur);
    return out;
}

} // namespace fdx
