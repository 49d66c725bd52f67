// SPDX-License-Identifier: Apache-2.0
//
// mmray - site-specific mmWave/sub-THz ray tracing and material calibration
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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmray/tracer.hpp"

namespace mmray {

struct PowerDelayProfile {
    struct Bin {
        double delay_ns;
        double power_mw;
    };
    std::vector<Bin> bins;      // delays nondecreasing
    double resolution_ns = 2.5;  // sounder bin width (2.5 ns at 28 GHz, 2 ns at 73/142 GHz)
};

struct SpreadReport {
    std::string location;
    double rms_delay_spread_ns = 0.0;
    double rms_angular_spread_deg = 0.0;  // circular, azimuth AoA
    int n_components = 0;
    bool angular_degenerate = false;  // zero mean resultant (antipodal power split)
};

/// Bins component powers (linear mW) into delay bins starting at the earliest
/// ToF; powers within a bin add. Throws std::invalid_argument on empty input.
PowerDelayProfile synthesize_pdp(const std::vector<MultipathComponent> &components,
                                 double resolution_ns);

/// Power-weighted RMS spread of component ToF, on the un-binned list.
double rms_delay_spread(const std::vector<MultipathComponent> &components);

/// Circular angular spread of azimuth AoA: sqrt(-2 ln |sum p e^{j theta} / sum p|),
/// in degrees. A zero mean resultant reports the cap value (180 degrees) and
/// sets *degenerate.
double rms_angular_spread(const std::vector<MultipathComponent> &components,
                          bool *degenerate = nullptr);

/// Cap reported for the degenerate (zero-resultant) angular spread.
inline constexpr double kAngularSpreadCapDeg = 180.0;

struct SpreadComparisonRow {
    std::string statistic;  // e.g. "delay_spread_mu_ns"
    std::optional<double> measured;
    std::optional<double> predicted;
    std::optional<double> delta;
};

/// Per-campaign mean/std of each spread and their differences. Throws
/// std::invalid_argument on length mismatch; single-location lists report
/// the standard deviation as not-available.
std::vector<SpreadComparisonRow> compare_statistics(const std::vector<SpreadReport> &measured,
                                                    const std::vector<SpreadReport> &simulated);

}  // namespace mmray
