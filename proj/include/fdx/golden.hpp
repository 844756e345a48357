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

#ifndef FDX_GOLDEN_HPP
#define FDX_GOLDEN_HPP

#include <cmath>
#include <cstddef>

namespace fdx
{

struct LineMinimum
{
    double x;
    double value;
    std::size_t evaluations;
};

/// Golden-section minimisation of a unimodal f on [a, b]. The endpoints are
/// evaluated too, so a minimum sitting on the boundary of the bracket (the
/// common case for box-constrained gains) is returned exactly.
template <class F>
LineMinimum golden_section_minimize(F &&f, double a, double b, double x_tol = 1e-12,
                                    std::size_t max_iterations = 200)
{
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    std::size_t evals = 2;
    const double lo = a, hi = b;

    for (std::size_t it = 0; it < max_iterations && (b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b)); ++it)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++evals;
    }

    LineMinimum best{fc < fd ? c : d, fc < fd ? fc : fd, evals};
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    const double flo = f(lo);
    const double fhi = f(hi);
    best.evaluations += 3;
    if (fm < best.value)
        best = {mid, fm, best.evaluations};
    if (flo < best.value)
        best = {lo, flo, best.evaluations};
    if (fhi < best.value)
        best = {hi, fhi, best.evaluations};
    return best;
}

} // namespace fdx

#endif
