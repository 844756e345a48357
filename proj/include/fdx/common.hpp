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

#ifndef FDX_COMMON_HPP
#define FDX_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdx
{

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Floor applied to every dB figure so that perfect cancellation stays finite.
inline constexpr double db_floor = -300.0;

class InvalidArgument : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Power ratio in dB, clamped at db_floor.
inline double power_db(double ratio)
{
    if (!(ratio > 0.0))
        return db_floor;
    const double db = 10.0 * std::log10(ratio);
    return db < db_floor ? db_floor : db;
}

inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

/// Non-fatal findings about a configuration (e.g. a broken narrowband assumption).
struct ValidityReport
{
    std::vector<std::string> flags;
    bool clean() const { return flags.empty(); }
};

/// SplitMix64 finaliser; used to derive independent per-trial / per-cell seeds.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a)
{
    return mix_seed(mix_seed(base) ^ (a + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b)
{
    return derive_seed(derive_seed(base, a), b);
}

} // namespace fdx

#endif
