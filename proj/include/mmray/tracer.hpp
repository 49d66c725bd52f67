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

#include "mmray/antenna.hpp"
#include "mmray/geometry.hpp"
#include "mmray/propagation.hpp"

namespace mmray {

struct TraceConfig {
    int tessellation_frequency = 30;
    int max_reflections = 5;   // up to fifth-order bounces
    int max_penetrations = 3;
    double rx_sensitivity_dbm = -120.0;
    double tx_power_dbm = 0.0;
    double frequency_ghz = 28.0;
    bool scattering_enabled = false;
    ScatteringParameters scattering;
    // Discovery mode retains rays regardless of sensitivity and overrides all
    // materials to a highly reflective initialization, so calibration sees
    // every geometric candidate.
    bool discovery_mode = false;
    // AoA+AoD matching threshold as a multiple of the antenna HPBW.
    double match_threshold_hpbw = 2.0;
};

/// Surface signature entry: which obstruction, what happened there.
struct SignatureStep {
    int obstruction = -1;
    InteractionKind kind = InteractionKind::Reflection;

    auto operator<=>(const SignatureStep &) const = default;
};
using Signature = std::vector<SignatureStep>;

std::string signature_to_string(const Signature &sig, const EnvironmentMap &env);

struct MultipathComponent {
    Vec3 aod;             // unit, from TX toward first path point
    Vec3 aoa;             // unit, from RX toward last path point
    double tof_ns = 0.0;
    double path_length_m = 0.0;
    double power_dbm = 0.0;
    std::vector<Interaction> interactions;
    Signature signature;
    std::vector<Vec3> points;  // TX, interaction points..., RX
};

struct TraceStats {
    long rays_launched = 0;
    long hits_tested = 0;
    long candidates = 0;       // components before dedup
    long components = 0;       // after dedup
};

struct TraceResult {
    std::vector<MultipathComponent> components;  // sorted by descending power
    bool los_blocked = false;
    TraceStats stats;
};

/// Hybrid SBR + image-correction trace between one TX-RX pair.
/// Throws std::invalid_argument if TX == RX or either endpoint is out of bounds.
TraceResult trace(const EnvironmentMap &env, const AntennaPose &tx, const AntennaPose &rx,
                  const AntennaPattern &tx_pattern, const AntennaPattern &rx_pattern,
                  const TraceConfig &config);

struct CorrectedPath {
    std::vector<Vec3> points;  // TX, reflection points..., RX
    double length = 0.0;
    Vec3 aod;
    Vec3 aoa;
    std::vector<Interaction> interactions;  // reflections + recomputed penetrations, in order
    Signature signature;                    // recomputed, includes penetrations
};

/// Exact specular path for a reflecting-surface sequence, by recursive TX
/// imaging and backtracking from the RX. Penetrations generate no images;
/// segment crossings through non-opaque obstructions are recorded as
/// penetration interactions. Empty if any unfolded point leaves its polygon,
/// a segment is blocked by an opaque obstruction, or penetration limits are
/// exceeded.
std::optional<CorrectedPath> correct_path(const Signature &signature, const Vec3 &tx,
                                          const Vec3 &rx, const EnvironmentMap &env,
                                          int max_penetrations);

/// One component per surface signature (corrected version kept), ordered by
/// descending power with lexicographic signature tie-break.
std::vector<MultipathComponent> dedup_components(std::vector<MultipathComponent> raw);

struct MeasuredDirection {
    Vec3 aoa;  // unit
    Vec3 aod;  // unit
    double power_dbm = 0.0;
};

struct ComponentMatch {
    int measured_index = -1;
    int simulated_index = -1;  // -1 when unmatched
    double deviation_rad = 0.0;  // AoA deviation + AoD deviation
};

/// For each measured record, the simulated component minimizing the summed
/// AoA/AoD angular deviation; pairs above threshold are reported unmatched.
std::vector<ComponentMatch> match_components(const std::vector<MultipathComponent> &simulated,
                                             const std::vector<MeasuredDirection> &measured,
                                             double threshold_rad);

}  // namespace mmray
