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

#include "fdx/channel.hpp"

#include <algorithm>
#include <random>

namespace fdx
{

MultipathChannel::MultipathChannel(std::vector<Tap> taps) : taps_(std::move(taps))
{
    if (taps_.empty())
        throw InvalidArgument("MultipathChannel: at least one tap is required");
    for (const auto &t : taps_)
    {
        if (!std::isfinite(t.delay_s) || t.delay_s < 0.0)
            throw InvalidArgument("MultipathChannel: tap delays must be finite and non-negative");
        if (!std::isfinite(t.gain.real()) || !std::isfinite(t.gain.imag()))
            throw InvalidArgument("MultipathChannel: tap gains must be finite");
    }
}

MultipathChannel MultipathChannel::identity() { return MultipathChannel({Tap{0.0, {1.0, 0.0}}}); }

MultipathChannel MultipathChannel::single_path(double delay_s, cplx gain)
{
    return MultipathChannel({Tap{delay_s, gain}});
}

cplx MultipathChannel::response_at(double freq_hz) const
{
    cplx acc{0.0, 0.0};
    for (const auto &t : taps_)
        acc += t.gain * std::polar(1.0, -two_pi * freq_hz * t.delay_s);
    return acc;
}

double MultipathChannel::total_power() const
{
    double p = 0.0;
    for (const auto &t : taps_)
        p += std::norm(t.gain);
    return p;
}

double MultipathChannel::max_delay() const
{
    double d = 0.0;
    for (const auto &t : taps_)
        d = std::max(d, t.delay_s);
    return d;
}

MultipathChannel MultipathChannel::operator+(const MultipathChannel &other) const
{
    std::vector<Tap> all = taps_;
    all.insert(all.end(), other.taps_.begin(), other.taps_.end());
    return MultipathChannel(std::move(all));
}

void FrequencyGrid::validate() const
{
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
        throw InvalidArgument("FrequencyGrid: carrier frequency must be positive");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
        throw InvalidArgument("FrequencyGrid: bandwidth must be positive");
    if (points < 2)
        throw InvalidArgument("FrequencyGrid: at least two grid points are required");
}

ValidityReport FrequencyGrid::validity() const
{
    ValidityReport r;
    if (bandwidth_hz / carrier_hz > 0.2)
        r.flags.push_back("bandwidth exceeds 20% of the carrier; narrowband delay model is approximate");
    return r;
}

double FrequencyGrid::frequency(std::size_t i) const
{
    const double lo = carrier_hz - 0.5 * bandwidth_hz;
    return lo + bandwidth_hz * static_cast<double>(i) / static_cast<double>(points - 1);
}

Eigen::VectorXd FrequencyGrid::frequencies() const
{
    Eigen::VectorXd f(static_cast<Eigen::Index>(points));
    for (std::size_t i = 0; i < points; ++i)
        f[static_cast<Eigen::Index>(i)] = frequency(i);
    return f;
}

ComplexSpectrum ComplexSpectrum::zeros(const FrequencyGrid &grid)
{
    grid.validate();
    return {grid, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.points))};
}

ComplexSpectrum ComplexSpectrum::constant(const FrequencyGrid &grid, cplx value)
{
    grid.validate();
    return {grid, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(grid.points), value)};
}

double ComplexSpectrum::peak_power() const { return values.size() ? values.cwiseAbs2().maxCoeff() : 0.0; }

double ComplexSpectrum::mean_power() const { return values.size() ? values.cwiseAbs2().mean() : 0.0; }

void require_same_grid(const ComplexSpectrum &a, const ComplexSpectrum &b)
{
    if (!(a.grid == b.grid) || a.values.size() != b.values.size())
        throw InvalidArgument("spectra are defined on different frequency grids");
}

ComplexSpectrum operator+(const ComplexSpectrum &a, const ComplexSpectrum &b)
{
    require_same_grid(a, b);
    return {a.grid, a.values + b.values};
}

ComplexSpectrum operator-(const ComplexSpectrum &a, const ComplexSpectrum &b)
{
    require_same_grid(a, b);
    return {a.grid, a.values - b.values};
}

ComplexSpectrum operator*(const ComplexSpectrum &a, const ComplexSpectrum &b)
{
    require_same_grid(a, b);
    return {a.grid, a.values.cwiseProduct(b.values)};
}

ComplexSpectrum operator*(cplx s, const ComplexSpectrum &a) { return {a.grid, s * a.values}; }

void PathLossModel::validate() const
{
    if (!(exponent > 0.0))
        throw InvalidArgument("PathLossModel: exponent must be positive");
    if (!(clamp_distance > 0.0))
        throw InvalidArgument("PathLossModel: clamp distance must be positive");
}

ComplexSpectrum frequency_response(const MultipathChannel &channel, const FrequencyGrid &grid)
{
    grid.validate();
    ComplexSpectrum s = ComplexSpectrum::zeros(grid);
    for (std::size_t i = 0; i < grid.points; ++i)
        s.values[static_cast<Eigen::Index>(i)] = channel.response_at(grid.frequency(i));
    return s;
}

double pathloss_gain(const PathLossModel &model, double distance)
{
    model.validate();
    if (distance < 0.0 || std::isnan(distance))
        throw InvalidArgument("pathloss_gain: distance must be non-negative");
    return std::pow(std::max(distance, model.clamp_distance), -model.exponent);
}

MultipathChannel sample_multipath(std::uint64_t seed, std::size_t tap_count, double delay_spread_s,
                                  double total_power)
{
    if (tap_count == 0)
        throw InvalidArgument("sample_multipath: tap_count must be at least 1");
    if (!(delay_spread_s > 0.0))
        throw InvalidArgument("sample_multipath: delay spread must be positive");
    if (!(total_power > 0.0))
        throw InvalidArgument("sample_multipath: total power must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> delay(0.0, delay_spread_s);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * total_power / static_cast<double>(tap_count)));

    std::vector<Tap> taps(tap_count);
    for (auto &t : taps)
    {
        t.delay_s = delay(rng);
        const double re = normal(rng);
        const double im = normal(rng);
        t.gain = {re, im};
    }
    return MultipathChannel(std::move(taps));
}

std::vector<cplx> sample_to_fir(const MultipathChannel &channel, double sample_rate_hz, std::size_t length)
{
    if (!(sample_rate_hz > 0.0) || length == 0)
        throw InvalidArgument("sample_to_fir: need a positive sample rate and length");
    std::vector<cplx> h(length, cplx{0.0, 0.0});
    for (std::size_t n = 0; n < length; ++n)
    {
        for (const auto &t : channel.taps())
        {
            const double x = static_cast<double>(n) - t.delay_s * sample_rate_hz;
            const double s = std::abs(x) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
            h[n] += t.gain * s;
        }
    }
    return h;
}

nlohmann::json to_json(const MultipathChannel &channel)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &t : channel.taps())
        arr.push_back({{"delay_s", t.delay_s}, {"re", t.gain.real()}, {"im", t.gain.imag()}});
    return arr;
}

MultipathChannel channel_from_json(const nlohmann::json &j)
{
    if (!j.is_array())
        throw InvalidArgument("channel JSON must be an array of taps");
    std::vector<Tap> taps;
    for (const auto &e : j)
    {
        if (!e.is_object() || !e.contains("delay_s") || !e.contains("re") || !e.contains("im"))
            throw InvalidArgument("channel tap JSON needs delay_s, re and im");
        taps.push_back(Tap{e.at("delay_s").get<double>(), {e.at("re").get<double>(), e.at("im").get<double>()}});
    }
    return MultipathChannel(std::move(taps));
}

} // namespace fdx
