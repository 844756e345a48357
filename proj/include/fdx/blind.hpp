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

// Cancellation tapped after the power amplifier, tuned blind.
//
// Signal flow (all blocks LTI, evaluated on the canceller grid):
//
//   u      = H1 x + w                  PA output; x unit-power signal, w TX noise
//   y      = H4 (H2 u + H3 s)          after the LNA; s unit-power remote signal
//   c      = H6 G H5 u                 cancellation path fed from the PA output
//   r      = y - c
//
// H1..H6 are unknown to the tuner, which only observes the power of r.

#ifndef FDX_BLIND_HPP
#define FDX_BLIND_HPP

#include "fdx/sicancel.hpp"

#include <cstdint>
#include <limits>

namespace fdx
{

struct BlindLoopModel
{
    static constexpr std::size_t noiseless = std::numeric_limits<std::size_t>::max();

    MultipathChannel h1 = MultipathChannel::identity(); ///< transmit chain up to the PA
    MultipathChannel h2 = MultipathChannel::identity(); ///< antenna coupling (SI channel)
    MultipathChannel h3 = MultipathChannel::identity(); ///< remote node to receive antenna
    MultipathChannel h4 = MultipathChannel::identity(); ///< LNA / receive front end
    MultipathChannel h5 = MultipathChannel::identity(); ///< coupler from PA output into the canceller
    MultipathChannel h6 = MultipathChannel::identity(); ///< canceller output into the combiner
    CancellerConfig g_config;
    AttenuatorSettings g;
    double tx_noise_power = 0.0;
    /// Samples per power measurement; `noiseless` gives the exact expectation.
    std::size_t measurement_samples = noiseless;

    void validate() const;
};

struct NoiseFloors
{
    double baseband_ref_floor_db = db_floor;
    double rf_tap_floor_db = db_floor;
    /// Mean uncancelled SI power, mean_f |H4 H2|^2 (|H1|^2 + tx_noise_power).
    double uncancelled_power = 0.0;
};

/// Residual SI power, relative to the uncancelled SI, for two architectures
/// sharing the model's tap settings G:
///   (a) baseband reference: the canceller is driven by H1 x only, so the TX
///       noise reaches the receiver through the SI path untouched;
///   (b) post-PA tap: the canceller is driven by u, noise included.
NoiseFloors tx_noise_floor_compare(const BlindLoopModel &model, const FrequencyGrid &grid);

/// SI-path response seen by the canceller, H4 H2 / (H6 H5). Fitting G to it is
/// equivalent to minimising the residual whenever |H6 H5|^2 (|H1|^2 + noise) is flat.
ComplexSpectrum equivalent_target(const BlindLoopModel &model);

/// Expected residual power mean_f |r|^2 for given settings (no measurement noise).
double residual_power(const BlindLoopModel &model, const AttenuatorSettings &settings, bool remote_active = false);

struct BlindTuneOptions
{
    /// Line search along the net displacement of each sweep.
    bool pattern_move = true;
    /// Include the remote signal in the measured power.
    bool remote_active = false;
    double line_tol = 1e-10;
};

struct BlindTuneResult
{
    AttenuatorSettings settings;
    /// Measured residual power of the accepted point: entry 0 is the initial
    /// settings, entry k follows sweep k.
    std::vector<double> trace;
    std::size_t measurements = 0;
};

/// Derivative-free tuning of G from power measurements only: cyclic coordinate
/// sweeps over the 4N gains, each a golden-section search on [0, 1], followed
/// by a golden-section search along the sweep's net displacement. A candidate
/// is accepted only if it measures lower than the current point.
BlindTuneResult blind_tune(const BlindLoopModel &model, std::size_t sweeps, std::uint64_t seed,
                           const BlindTuneOptions &options = {});

} // namespace fdx

#endif
