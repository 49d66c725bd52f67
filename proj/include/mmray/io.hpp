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

#include <filesystem>
#include <string>
#include <vector>

#include "mmray/calibration.hpp"
#include "mmray/channel_stats.hpp"
#include "mmray/tracer.hpp"

namespace mmray {

/// File/schema problem; the message names the offending field.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Environment-map JSON: { "version": 1, "materials": {...}, "obstructions": [...] }.
EnvironmentMap load_environment(const std::filesystem::path &file);

/// Antenna cut CSV with header `angle_deg,relative_gain_db`.
AntennaPattern load_antenna_cut(const std::filesystem::path &file, double boresight_gain_dbi,
                                double hpbw_deg);

/// Measurements CSV: id,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,tx_az_deg,tx_el_deg,
/// rx_az_deg,rx_el_deg,tx_power_dbm,measured_power_dbm,freq_ghz.
std::vector<MeasurementRecord> load_measurements(const std::filesystem::path &file);

/// Unit vector for azimuth/elevation in degrees (azimuth from +x toward +y,
/// elevation from the horizontal plane).
Vec3 az_el_to_vec(double az_deg, double el_deg);
void vec_to_az_el(const Vec3 &v, double &az_deg, double &el_deg);

/// Components CSV, header:
/// path_id,power_dbm,tof_ns,aod_az_deg,aod_el_deg,aoa_az_deg,aoa_el_deg,n_refl,n_pen,n_scat,signature
std::string components_to_csv(const std::vector<MultipathComponent> &components,
                              const EnvironmentMap &env);
std::vector<MultipathComponent> components_from_csv(const std::filesystem::path &file);

/// Spread reports CSV: location,rms_delay_spread_ns,rms_angular_spread_deg,n_components
std::string spreads_to_csv(const std::vector<SpreadReport> &reports);
std::vector<SpreadReport> spreads_from_csv(const std::filesystem::path &file);

/// Fixed-precision decimal (9 significant digits) used for all numeric output.
std::string format_number(double v);

/// Writes content to a temporary file and renames it into place.
void atomic_write(const std::filesystem::path &file, const std::string &content);

/// Minimal built-in SVG emission: one polyline series per call plus markers.
struct SvgSeries {
    std::vector<std::pair<double, double>> points;
    std::string color = "#1f6fb4";
    bool scatter = false;  // markers only, no polyline
};
std::string render_svg(const std::vector<SvgSeries> &series, const std::string &x_label,
                       const std::string &y_label, int width = 640, int height = 420);

}  // namespace mmray
