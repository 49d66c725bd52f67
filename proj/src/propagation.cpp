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

#include "mmray/propagation.hpp"

#include <stdexcept>

namespace mmray {

double fspl_db(double distance_m, double frequency_ghz) {
    if (distance_m <= 0.0 || frequency_ghz <= 0.0)
        throw std::invalid_argument("fspl_db: distance and frequency must be positive");
    double f_hz = frequency_ghz * 1e9;
    return 20.0 * std::log10(4.0 * kPi * distance_m * f_hz / kSpeedOfLight);
}

double reflect_power_db(double incident_dbm, const MaterialProfile &material) {
    return incident_dbm - material.reflection_loss_db;
}

std::optional<double> penetrate_power_db(double incident_dbm, const MaterialProfile &material) {
    if (material.opaque()) return std::nullopt;
    return incident_dbm - *material.penetration_loss_db;
}

double rayleigh_critical_height(double wavelength_m, double incidence_angle_rad) {
    if (incidence_angle_rad < 0.0 || incidence_angle_rad >= kPi / 2.0)
        throw std::invalid_argument("rayleigh_critical_height: angle must be in [0, pi/2)");
    return wavelength_m / (8.0 * std::cos(incidence_angle_rad));
}

bool surface_scatters(const MaterialProfile &material, double wavelength_m,
                      double incidence_angle_rad) {
    if (material.scattering_enabled) return true;
    if (material.roughness_height_m <= 0.0) return false;
    if (incidence_angle_rad >= kPi / 2.0) return false;  // grazing: every surface smooth
    return material.roughness_height_m > rayleigh_critical_height(wavelength_m, incidence_angle_rad);
}

double scatter_gain(double psi_forward_rad, double psi_back_rad,
                    const ScatteringParameters &params) {
    if (psi_forward_rad < 0.0 || psi_forward_rad > kPi || psi_back_rad < 0.0 || psi_back_rad > kPi)
        throw std::invalid_argument("scatter_gain: lobe angles must be in [0, pi]");
    double fwd = std::pow((1.0 + std::cos(psi_forward_rad)) / 2.0, params.alpha_forward);
    double back = std::pow((1.0 + std::cos(psi_back_rad)) / 2.0, params.alpha_back);
    return params.lambda_mix * fwd + (1.0 - params.lambda_mix) * back;
}

double scattered_power_dbm(double incident_dbm, double seg1_m, double seg2_m, double lobe_gain,
                           const ScatteringParameters &params, double frequency_ghz) {
    if (seg1_m <= 0.0 || seg2_m <= 0.0)
        throw std::invalid_argument("scattered_power_dbm: segments must be positive");
    // Power at 1 m from the scatter point: incident * S^2 * lobe_gain.
    // Spreading beyond 1 m: fspl(seg2) - fspl(1 m) = 20 log10(seg2).
    return incident_dbm + 20.0 * std::log10(params.s_coefficient) + 10.0 * std::log10(lobe_gain) -
           (fspl_db(seg2_m, frequency_ghz) - fspl_db(1.0, frequency_ghz));
}

}  // namespace mmray
