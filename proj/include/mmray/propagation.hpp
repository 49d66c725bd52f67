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

#include "mmray/vec3.hpp"

namespace mmray {

/// Electrical properties of one building material. Losses are positive dB per
/// interaction; an absent penetration loss marks the material opaque.
struct MaterialProfile {
    std::string name;
    double reflection_loss_db = 0.0;
    std::optional<double> penetration_loss_db;  // empty = opaque
    double roughness_height_m = 0.0;            // peak-to-peak surface perturbation
    bool scattering_enabled = false;            // force diffuse scattering regardless of roughness

    bool opaque() const { return !penetration_loss_db.has_value(); }
};

/// Dual-lobe directive scattering parameters, shared by all materials.
struct ScatteringParameters {
    double lambda_mix = 0.8;   // forward-lobe weight, in [0,1]
    int alpha_back = 10;       // back-scatter lobe width exponent
    int alpha_forward = 10;    // forward-scatter lobe width exponent
    double s_coefficient = 0.1;  // scattering amplitude coefficient, in [0,1]
};

enum class InteractionKind { Reflection, Penetration, Scattering };

/// One surface interaction along a traced path.
struct Interaction {
    InteractionKind kind;
    int obstruction = -1;       // index into EnvironmentMap::obstructions
    std::string material_id;
    Vec3 point;
    double incidence_angle = 0.0;  // from the surface normal, in [0, pi/2]
};

/// Friis free-space path loss in dB. distance in meters, frequency in GHz.
double fspl_db(double distance_m, double frequency_ghz);

/// Angle-independent reflection: incident power minus the material's reflection loss.
double reflect_power_db(double incident_dbm, const MaterialProfile &material);

/// Thin-wall penetration: empty for opaque materials, otherwise incident power
/// minus the material's partition loss. The transmitted ray continues along
/// the incident direction with no lateral displacement.
std::optional<double> penetrate_power_db(double incident_dbm, const MaterialProfile &material);

/// Rayleigh criterion critical height lambda/(8 cos theta_i). A surface is
/// rough iff its perturbation height exceeds this value.
double rayleigh_critical_height(double wavelength_m, double incidence_angle_rad);

/// True if the material scatters at the given wavelength and incidence angle:
/// either explicitly enabled or failing the Rayleigh smoothness test.
bool surface_scatters(const MaterialProfile &material, double wavelength_m,
                      double incidence_angle_rad);

/// Bracketed lobe factor of the dual-lobe directive scattering model:
///   Lambda * ((1+cos psi_f)/2)^alpha_fwd + (1-Lambda) * ((1+cos psi_b)/2)^alpha_back
/// psi_f is measured from the specular-reflection direction, psi_b from the
/// reversed incident direction. Result lies in [0, 1].
double scatter_gain(double psi_forward_rad, double psi_back_rad, const ScatteringParameters &params);

/// Power of a scattered ray at the RX. The incident power already includes
/// spreading over the TX-to-scatterer segment seg1; the scattered power is
/// defined at 1 m from the scatter point as incident * S^2 * lobe_gain and
/// then spread over seg2 with the 1/s^2 law, giving the composite 1/(s1 s2)^2
/// dependence.
double scattered_power_dbm(double incident_dbm, double seg1_m, double seg2_m, double lobe_gain,
                           const ScatteringParameters &params, double frequency_ghz);

}  // namespace mmray
