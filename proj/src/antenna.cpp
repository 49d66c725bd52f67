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

#include "mmray/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmray {

void AntennaPattern::validate() const {
    if (azimuth_cut.size() < 2) throw std::invalid_argument("antenna cut: needs >= 2 samples");
    if (!std::is_sorted(azimuth_cut.begin(), azimuth_cut.end(),
                        [](const auto &a, const auto &b) { return a.first < b.first; }))
        throw std::invalid_argument("antenna cut: samples must be sorted by angle");
    if (azimuth_cut.front().first > -180.0 + 1e-9 || azimuth_cut.back().first < 180.0 - 1e-9)
        throw std::invalid_argument("antenna cut: must cover [-180, 180] degrees");
    if (std::abs(relative_gain_db(0.0)) > 0.01)
        throw std::invalid_argument("antenna cut: boresight relative gain must be 0 dB");
    for (const auto &[ang, g] : azimuth_cut)
        if (g > 1e-9) throw std::invalid_argument("antenna cut: relative gains must be <= 0 dB");
}

double AntennaPattern::relative_gain_db(double theta_deg) const {
    // Rotational symmetry: evaluate the cut at +theta.
    double t = std::clamp(theta_deg, azimuth_cut.front().first, azimuth_cut.back().first);
    auto it = std::lower_bound(azimuth_cut.begin(), azimuth_cut.end(), t,
                               [](const auto &s, double v) { return s.first < v; });
    if (it == azimuth_cut.begin()) return it->second;
    if (it == azimuth_cut.end()) return azimuth_cut.back().second;
    auto [a1, g1] = *(it - 1);
    auto [a2, g2] = *it;
    if (a2 == a1) return g1;
    double w = (t - a1) / (a2 - a1);
    return g1 + w * (g2 - g1);
}

double gain_toward(const AntennaPattern &pattern, const AntennaPose &pose, const Vec3 &direction) {
    double theta = rad2deg(angle_between(pose.boresight, direction));
    return pattern.boresight_gain_dbi + pattern.relative_gain_db(theta);
}

AntennaPattern synthetic_pattern(double hpbw_deg, double boresight_gain_dbi) {
    if (hpbw_deg <= 0.0 || hpbw_deg >= 180.0)
        throw std::invalid_argument("synthetic_pattern: hpbw must be in (0, 180)");
    AntennaPattern p;
    p.boresight_gain_dbi = boresight_gain_dbi;
    p.hpbw_deg = hpbw_deg;
    for (int a = -180; a <= 180; ++a) {
        double rel = -3.0 * std::pow(2.0 * a / hpbw_deg, 2);
        p.azimuth_cut.emplace_back(static_cast<double>(a), std::max(rel, -40.0));
    }
    return p;
}

AntennaPattern isotropic_pattern(double gain_dbi) {
    AntennaPattern p;
    p.boresight_gain_dbi = gain_dbi;
    p.hpbw_deg = 360.0;
    p.azimuth_cut = {{-180.0, 0.0}, {180.0, 0.0}};
    return p;
}

}  // namespace mmray
