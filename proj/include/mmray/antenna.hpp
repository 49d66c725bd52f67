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

#include <string>
#include <utility>
#include <vector>

#include "mmray/vec3.hpp"

namespace mmray {

/// Directional gain model built from a measured 2D azimuth cut. The cut is
/// rotated about the boresight axis, so gain depends only on the off-boresight
/// angle theta.
struct AntennaPattern {
    double boresight_gain_dbi = 0.0;
    double hpbw_deg = 360.0;
    // (angle in degrees over [-180, 180], relative gain in dB <= 0), sorted by angle.
    std::vector<std::pair<double, double>> azimuth_cut;

    /// Relative gain at off-boresight angle theta (degrees, >= 0), linear-in-dB
    /// interpolation between cut samples.
    double relative_gain_db(double theta_deg) const;

    /// Validates the cut: 0 dB at boresight within 0.01 dB, gains <= 0,
    /// coverage of [-180, 180]. Throws std::invalid_argument.
    void validate() const;
};

struct AntennaPose {
    Vec3 position;
    Vec3 boresight{1.0, 0.0, 0.0};  // unit
};

/// Gain (dBi) toward a unit direction: boresight gain plus the interpolated
/// relative gain at the angle between boresight and direction.
double gain_toward(const AntennaPattern &pattern, const AntennaPose &pose, const Vec3 &direction);

/// Gaussian-mainlobe fixture pattern: relative gain -3*(2 theta / hpbw)^2 dB,
/// floored at -40 dB. Throws std::invalid_argument unless 0 < hpbw < 180.
AntennaPattern synthetic_pattern(double hpbw_deg, double boresight_gain_dbi);

/// Isotropic 0 dB pattern with the given boresight gain.
AntennaPattern isotropic_pattern(double gain_dbi = 0.0);

}  // namespace mmray
