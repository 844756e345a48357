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

// All-passive RF self-interference canceller.
//
// The cancellation path is a ladder of N clusters. Cluster n sits behind a
// large delay n*T and holds four tunable attenuators behind small delays
// m*delta (m = 0..3), with delta close to a quarter carrier period, so that
// the four paths carry phasors near 1, -j, -1, +j. Non-negative attenuator
// gains can therefore synthesise any complex tap in the unit square:
//
//   C(f) = sum_n exp(-j2 pi f n T) sum_m beta[n][m] exp(-j2 pi f m delta)
//
// with f the absolute (passband) frequency. The canceller output is
// subtracted from the SI, residual = H_SI - C.

#ifndef FDX_SICANCEL_HPP
#define FDX_SICANCEL_HPP

#include "fdx/channel.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace fdx
{

struct CancellerConfig
{
    std::size_t clusters = 5;
    double small_delay_s = 0.0;
    double large_delay_s = 0.0;
    FrequencyGrid grid;

    /// delta = 1/(4 f_c), T = large_delay_bw_product / W.
    static CancellerConfig standard(std::size_t clusters, const FrequencyGrid &grid,
                                    double large_delay_bw_product = 0.1);

    void validate() const;
    /// Flags |f_c delta - 1/4| > 0.05 and T >= 1/W.
    ValidityReport validity() const;

    std::size_t parameter_count() const { return 4 * clusters; }
    /// Largest path delay in the ladder, (N-1) T + 3 delta.
    double span_s() const;
};

/// Linear amplitude gains beta[n][m] in [0, 1].
class AttenuatorSettings
{
public:
    AttenuatorSettings() = default;
    explicit AttenuatorSettings(std::size_t clusters);
    explicit AttenuatorSettings(std::vector<std::array<double, 4>> gains);

    static AttenuatorSettings from_vector(const Eigen::VectorXd &flat);

    std::size_t clusters() const { return gains_.size(); }
    double &at(std::size_t n, std::size_t m) { return gains_.at(n).at(m); }
    double at(std::size_t n, std::size_t m) const { return gains_.at(n).at(m); }
    const std::vector<std::array<double, 4>> &gains() const { return gains_; }

    /// Flattened in cluster-major order, index 4n + m.
    Eigen::VectorXd to_vector() const;

    /// Throws InvalidArgument if any gain is outside [0, 1] or not finite.
    void validate() const;

    /// Appends all-zero clusters; the response is unchanged.
    AttenuatorSettings padded_to(std::size_t clusters) const;

    bool operator==(const AttenuatorSettings &) const = default;

private:
    std::vector<std::array<double, 4>> gains_;
};

struct QuantizationSpec
{
    double step_db = 0.5;
    double min_gain_db = -60.0;

    void validate() const;
};

struct ResidualReport
{
    FrequencyGrid grid;
    std::vector<double> residual_db;
    double worst_db = db_floor;
    /// Mean of the linear normalised residual, expressed in dB.
    double mean_db = db_floor;

    /// CSV with header "freq_hz,residual_db".
    void write_csv(std::ostream &os) const;
};

/// Complex M x 4N matrix whose column 4n+m is exp(-j2 pi f (nT + m delta)).
Eigen::MatrixXcd canceller_basis(const CancellerConfig &cfg);

ComplexSpectrum canceller_response(const CancellerConfig &cfg, const AttenuatorSettings &settings);

struct FitOptions
{
    /// Stationarity tolerance on the gradient of J(beta)/J(0), where
    /// J(beta) = mean_f |H_SI(f) - C(f)|^2. The basis is conditioned near
    /// 1e13, so directions of curvature 1e-13 still move J at 1e-17 for a
    /// gradient of 1e-15; the default resolves optima below -150 dB.
    double tol = 1e-20;
    std::size_t max_iterations = 2000;
};

struct FitResult
{
    AttenuatorSettings settings;
    /// Normalised objective J/J(0) after each outer iteration of every stage; starts at 1.
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
};

class FitBudgetExceeded : public std::runtime_error
{
public:
    FitBudgetExceeded(FitResult best);
    const FitResult &best() const { return best_; }

private:
    FitResult best_;
};

/// Box-constrained least squares fit of the canceller to a target SI response,
/// min over beta in [0,1]^{4N} of sum_f |H_SI(f) - C(f)|^2. Clusters are
/// added one at a time, each stage warm-started from the previous optimum, so
/// the objective never increases with N.
FitResult fit_attenuators(const ComplexSpectrum &target, const CancellerConfig &cfg,
                          const FitOptions &options = {});

/// Gradient of J(beta)/J(0) with respect to the flattened gains.
Eigen::VectorXd fit_gradient(const ComplexSpectrum &target, const CancellerConfig &cfg,
                             const AttenuatorSettings &settings);

/// Round each non-zero gain to the nearest multiple of step_db (amplitude dB,
/// 20 log10 beta). Results below min_gain_db become exactly zero.
AttenuatorSettings quantize_settings(const AttenuatorSettings &settings, const QuantizationSpec &q);

/// Normalised residual 10 log10(|H_SI - C|^2 / max_f |H_SI|^2), floored at -300 dB.
ResidualReport residual_report(const ComplexSpectrum &si, const ComplexSpectrum &cancel);

// --- time-domain transmit beamforming ---

struct TdtbFilter
{
    std::vector<cplx> coefficients;
    /// ||h_si + h_aux * g||^2 / ||h_si||^2.
    double residual_ratio = 0.0;
    double residual_db = db_floor;
    /// ||A^H r|| / (||A|| ||h_si||), the relative normal-equation residual.
    double normal_equation_residual = 0.0;
};

/// Least-squares auxiliary filter g of length filter_length minimising
/// ||h_si + h_aux (*) g||^2 (linear convolution).
TdtbFilter design_tdtb(const std::vector<cplx> &si_ir, const std::vector<cplx> &aux_ir, std::size_t filter_length);

std::vector<cplx> convolve(const std::vector<cplx> &a, const std::vector<cplx> &b);

} // namespace fdx

#endif
