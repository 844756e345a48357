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

// Channel primitives shared by every other module: tapped-delay-line
// channels, their analytic frequency responses, deterministic path loss and
// seeded random channel draws.

#ifndef FDX_CHANNEL_HPP
#define FDX_CHANNEL_HPP

#include "fdx/common.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fdx
{

struct Tap
{
    double delay_s = 0.0;
    cplx gain{1.0, 0.0};
};

/// Linear time-invariant multipath channel, h(t) = sum_k a_k delta(t - tau_k).
class MultipathChannel
{
public:
    /// Throws InvalidArgument unless there is at least one tap, every delay
    /// is finite and non-negative and every gain is finite.
    explicit MultipathChannel(std::vector<Tap> taps);

    /// Single tap of unit gain at delay zero.
    static MultipathChannel identity();
    static MultipathChannel single_path(double delay_s, cplx gain);

    const std::vector<Tap> &taps() const { return taps_; }
    std::size_t size() const { return taps_.size(); }

    /// H(f) = sum_k a_k exp(-j 2 pi f tau_k) at one frequency.
    cplx response_at(double freq_hz) const;
    double total_power() const;
    double max_delay() const;

    /// Tap-wise union; the response of the sum is the sum of the responses.
    MultipathChannel operator+(const MultipathChannel &other) const;

private:
    std::vector<Tap> taps_;
};

/// Uniform grid over [f_c - W/2, f_c + W/2] with both endpoints included.
struct FrequencyGrid
{
    double carrier_hz = 2.4e9;
    double bandwidth_hz = 100e6;
    std::size_t points = 201;

    void validate() const;
    /// Flags W/f_c > 0.2; the grid is still usable.
    ValidityReport validity() const;

    double frequency(std::size_t i) const;
    Eigen::VectorXd frequencies() const;

    bool operator==(const FrequencyGrid &) const = default;
};

struct ComplexSpectrum
{
    FrequencyGrid grid;
    Eigen::VectorXcd values;

    static ComplexSpectrum zeros(const FrequencyGrid &grid);
    static ComplexSpectrum constant(const FrequencyGrid &grid, cplx value);

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    double peak_power() const;
    /// Mean of |H(f)|^2 over the grid.
    double mean_power() const;
};

/// Throws InvalidArgument when the two spectra live on different grids.
void require_same_grid(const ComplexSpectrum &a, const ComplexSpectrum &b);

ComplexSpectrum operator+(const ComplexSpectrum &a, const ComplexSpectrum &b);
ComplexSpectrum operator-(const ComplexSpectrum &a, const ComplexSpectrum &b);
/// Pointwise product, i.e. cascading two LTI blocks.
ComplexSpectrum operator*(const ComplexSpectrum &a, const ComplexSpectrum &b);
ComplexSpectrum operator*(cplx s, const ComplexSpectrum &a);

struct PathLossModel
{
    double exponent = 2.0;
    double clamp_distance = 0.01;

    void validate() const;
};

ComplexSpectrum frequency_response(const MultipathChannel &channel, const FrequencyGrid &grid);

/// Power gain max(d, eps)^(-alpha).
double pathloss_gain(const PathLossModel &model, double distance);

/// Delays uniform on [0, delay_spread], gains i.i.d. CN(0, total_power / tap_count).
MultipathChannel sample_multipath(std::uint64_t seed, std::size_t tap_count, double delay_spread_s,
                                  double total_power);

/// Band-limited (sinc-interpolated) samples h[n] = sum_k a_k sinc(n - tau_k fs), n = 0..length-1.
std::vector<cplx> sample_to_fir(const MultipathChannel &channel, double sample_rate_hz, std::size_t length);

/// JSON array of {"delay_s", "re", "im"} objects.
nlohmann::json to_json(const MultipathChannel &channel);
MultipathChannel channel_from_json(const nlohmann::json &j);

} // namespace fdx

#endif
