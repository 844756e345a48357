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

#include "fdx/sicancel.hpp"

#include "bvls.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace fdx
{

CancellerConfig CancellerConfig::standard(std::size_t clusters, const FrequencyGrid &grid,
                                          double large_delay_bw_product)
{
    grid.validate();
    CancellerConfig cfg;
    cfg.clusters = clusters;
    cfg.grid = grid;
    cfg.small_delay_s = 1.0 / (4.0 * grid.carrier_hz);
    cfg.large_delay_s = large_delay_bw_product / grid.bandwidth_hz;
    cfg.validate();
    return cfg;
}

void CancellerConfig::validate() const
{
    grid.validate();
    if (clusters < 1)
        throw InvalidArgument("CancellerConfig: at least one cluster is required");
    if (!(small_delay_s > 0.0) || !std::isfinite(small_delay_s))
        throw InvalidArgument("CancellerConfig: small delay must be positive");
    if (!(large_delay_s > 0.0) || !std::isfinite(large_delay_s))
        throw InvalidArgument("CancellerConfig: large delay must be positive");
}

ValidityReport CancellerConfig::validity() const
{
    ValidityReport r = grid.validity();
    if (std::abs(grid.carrier_hz * small_delay_s - 0.25) > 0.05)
        r.flags.push_back("small delay is not close to a quarter carrier period");
    if (large_delay_s * grid.bandwidth_hz >= 1.0)
        r.flags.push_back("large delay is not small compared with 1/W");
    return r;
}

double CancellerConfig::span_s() const
{
    return static_cast<double>(clusters - 1) * large_delay_s + 3.0 * small_delay_s;
}

AttenuatorSettings::AttenuatorSettings(std::size_t clusters) : gains_(clusters, {0.0, 0.0, 0.0, 0.0}) {}

AttenuatorSettings::AttenuatorSettings(std::vector<std::array<double, 4>> gains) : gains_(std::move(gains))
{
    validate();
}

AttenuatorSettings AttenuatorSettings::from_vector(const Eigen::VectorXd &flat)
{
    if (flat.size() % 4 != 0)
        throw InvalidArgument("AttenuatorSettings: flat vector length must be a multiple of 4");
    AttenuatorSettings s(static_cast<std::size_t>(flat.size() / 4));
    for (Eigen::Index i = 0; i < flat.size(); ++i)
        s.gains_[static_cast<std::size_t>(i / 4)][static_cast<std::size_t>(i % 4)] = flat[i];
    s.validate();
    return s;
}

Eigen::VectorXd AttenuatorSettings::to_vector() const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(4 * gains_.size()));
    for (std::size_t n = 0; n < gains_.size(); ++n)
        for (std::size_t m = 0; m < 4; ++m)
            v[static_cast<Eigen::Index>(4 * n + m)] = gains_[n][m];
    return v;
}

void AttenuatorSettings::validate() const
{
    for (const auto &c : gains_)
        for (double g : c)
            if (!(g >= 0.0 && g <= 1.0))
                throw InvalidArgument("AttenuatorSettings: gains must lie in [0, 1]");
}

AttenuatorSettings AttenuatorSettings::padded_to(std::size_t clusters) const
{
    if (clusters < gains_.size())
        throw InvalidArgument("AttenuatorSettings: cannot pad to fewer clusters");
    AttenuatorSettings s = *this;
    s.gains_.resize(clusters, {0.0, 0.0, 0.0, 0.0});
    return s;
}

void QuantizationSpec::validate() const
{
    if (!(step_db > 0.0))
        throw InvalidArgument("QuantizationSpec: step must be positive");
    if (!(min_gain_db < 0.0))
        throw InvalidArgument("QuantizationSpec: minimum gain must be negative");
}

void ResidualReport::write_csv(std::ostream &os) const
{
    os << "freq_hz,residual_db\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < residual_db.size(); ++i)
        os << grid.frequency(i) << ',' << residual_db[i] << '\n';
}

Eigen::MatrixXcd canceller_basis(const CancellerConfig &cfg)
{
    cfg.validate();
    const auto m_points = static_cast<Eigen::Index>(cfg.grid.points);
    Eigen::MatrixXcd a(m_points, static_cast<Eigen::Index>(cfg.parameter_count()));
    for (Eigen::Index i = 0; i < m_points; ++i)
    {
        const double f = cfg.grid.frequency(static_cast<std::size_t>(i));
        for (std::size_t n = 0; n < cfg.clusters; ++n)
            for (std::size_t m = 0; m < 4; ++m)
            {
                const double delay =
                    static_cast<double>(n) * cfg.large_delay_s + static_cast<double>(m) * cfg.small_delay_s;
                a(i, static_cast<Eigen::Index>(4 * n + m)) = std::polar(1.0, -two_pi * f * delay);
            }
    }
    return a;
}

ComplexSpectrum canceller_response(const CancellerConfig &cfg, const AttenuatorSettings &settings)
{
    cfg.validate();
    if (settings.clusters() != cfg.clusters)
        throw InvalidArgument("canceller_response: settings have " + std::to_string(settings.clusters()) +
                              " clusters, config has " + std::to_string(cfg.clusters));
    settings.validate();
    const Eigen::MatrixXcd a = canceller_basis(cfg);
    const Eigen::VectorXd beta = settings.to_vector();
    return {cfg.grid, a * beta.cast<cplx>()};
}

namespace
{

// Stack a complex system into an equivalent real one: [Re A; Im A] beta = [Re h; Im h].
void realify(const Eigen::MatrixXcd &a, const Eigen::VectorXcd &h, Eigen::MatrixXd &ar, Eigen::VectorXd &hr)
{
    const Eigen::Index m = a.rows();
    ar.resize(2 * m, a.cols());
    ar.topRows(m) = a.real();
    ar.bottomRows(m) = a.imag();
    hr.resize(2 * m);
    hr.head(m) = h.real();
    hr.tail(m) = h.imag();
}

} // namespace

FitBudgetExceeded::FitBudgetExceeded(FitResult best)
    : std::runtime_error("fit_attenuators: iteration budget exceeded before stationarity"), best_(std::move(best))
{
}

FitResult fit_attenuators(const ComplexSpectrum &target, const CancellerConfig &cfg, const FitOptions &options)
{
    cfg.validate();
    if (!(target.grid == cfg.grid) || target.size() != cfg.grid.points)
        throw InvalidArgument("fit_attenuators: target and canceller use different grids");

    Eigen::MatrixXd ar;
    Eigen::VectorXd hr;
    realify(canceller_basis(cfg), target.values, ar, hr);

    const Eigen::Index n = ar.cols();
    const double j0 = hr.squaredNorm();
    FitResult result;
    if (!(j0 > 0.0))
    {
        result.settings = AttenuatorSettings(cfg.clusters);
        result.objective_trace = {0.0};
        return result;
    }

    // Continuation over the cluster count: the fit with c clusters starts from
    // the (c-1)-cluster optimum padded with zeros, which it can only improve.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    result.objective_trace.push_back(1.0);
    bool converged = true;
    for (std::size_t c = 1; c <= cfg.clusters && converged; ++c)
    {
        const auto cols = static_cast<Eigen::Index>(4 * c);
        const std::size_t budget = options.max_iterations - std::min(options.max_iterations, result.iterations);
        const auto solved = detail::bvls(ar.leftCols(cols), hr, Eigen::VectorXd::Zero(cols),
                                         Eigen::VectorXd::Ones(cols), x.head(cols), options.tol, 2.0 / j0, budget);
        x.head(cols) = solved.x.cwiseMax(0.0).cwiseMin(1.0);
        result.iterations += solved.iterations;
        for (std::size_t i = 1; i < solved.objective.size(); ++i)
            result.objective_trace.push_back(solved.objective[i] / j0);
        converged = solved.converged;
    }

    result.settings = AttenuatorSettings::from_vector(x);
    if (!converged)
        throw FitBudgetExceeded(std::move(result));
    return result;
}

Eigen::VectorXd fit_gradient(const ComplexSpectrum &target, const CancellerConfig &cfg,
                             const AttenuatorSettings &settings)
{
    Eigen::MatrixXd ar;
    Eigen::VectorXd hr;
    realify(canceller_basis(cfg), target.values, ar, hr);
    const Eigen::VectorXd beta = settings.to_vector();
    return -2.0 * ar.transpose() * (hr - ar * beta) / hr.squaredNorm();
}

AttenuatorSettings quantize_settings(const AttenuatorSettings &settings, const QuantizationSpec &q)
{
    q.validate();
    settings.validate();
    AttenuatorSettings out = settings;
    for (std::size_t n = 0; n < out.clusters(); ++n)
        for (std::size_t m = 0; m < 4; ++m)
        {
            double &g = out.at(n, m);
            if (g == 0.0)
                continue;
            const double db = std::round(20.0 * std::log10(g) / q.step_db) * q.step_db;
            g = db < q.min_gain_db ? 0.0 : std::min(1.0, std::pow(10.0, db / 20.0));
        }
    return out;
}

ResidualReport residual_report(const ComplexSpectrum &si, const ComplexSpectrum &cancel)
{
    require_same_grid(si, cancel);
    const double peak = si.peak_power();
    if (!(peak > 0.0))
        throw InvalidArgument("residual_report: SI spectrum is identically zero");

    ResidualReport r;
    r.grid = si.grid;
    r.residual_db.reserve(si.size());
    double worst = 0.0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < si.values.size(); ++i)
    {
        const double ratio = std::norm(si.values[i] - cancel.values[i]) / peak;
        r.residual_db.push_back(power_db(ratio));
        worst = std::max(worst, ratio);
        sum += ratio;
    }
    r.worst_db = power_db(worst);
    r.mean_db = power_db(sum / static_cast<double>(si.size()));
    return r;
}

std::vector<cplx> convolve(const std::vector<cplx> &a, const std::vector<cplx> &b)
{
    if (a.empty() || b.empty())
        return {};
    std::vector<cplx> out(a.size() + b.size() - 1, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

TdtbFilter design_tdtb(const std::vector<cplx> &si_ir, const std::vector<cplx> &aux_ir, std::size_t filter_length)
{
    if (si_ir.empty() || aux_ir.empty())
        throw InvalidArgument("design_tdtb: impulse responses must be non-empty");
    if (filter_length < 1)
        throw InvalidArgument("design_tdtb: filter length must be at least 1");
    if (std::all_of(aux_ir.begin(), aux_ir.end(), [](cplx v) { return v == cplx{0.0, 0.0}; }))
        throw InvalidArgument("design_tdtb: auxiliary channel is identically zero");

    const std::size_t out_len = std::max(si_ir.size(), aux_ir.size() + filter_length - 1);
    const auto rows = static_cast<Eigen::Index>(out_len);
    const auto cols = static_cast<Eigen::Index>(filter_length);

    // Convolution (Toeplitz) matrix of the auxiliary channel.
    Eigen::MatrixXcd conv = Eigen::MatrixXcd::Zero(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (std::size_t k = 0; k < aux_ir.size(); ++k)
            conv(c + static_cast<Eigen::Index>(k), c) = aux_ir[k];

    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(rows);
    for (std::size_t k = 0; k < si_ir.size(); ++k)
        h[static_cast<Eigen::Index>(k)] = si_ir[k];

    // min ||h + conv g||  <=>  conv g ~ -h
    const Eigen::VectorXcd g = conv.colPivHouseholderQr().solve(-h);
    const Eigen::VectorXcd r = h + conv * g;

    TdtbFilter out;
    out.coefficients.assign(g.data(), g.data() + g.size());
    const double hn = h.squaredNorm();
    out.residual_ratio = hn > 0.0 ? r.squaredNorm() / hn : 0.0;
    out.residual_db = power_db(out.residual_ratio);
    const double scale = conv.norm() * std::sqrt(hn);
    out.normal_equation_residual = scale > 0.0 ? (conv.adjoint() * r).norm() / scale : 0.0;
    return out;
}

} // namespace fdx
