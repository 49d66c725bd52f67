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

/// One directional field measurement.
struct MeasurementRecord {
    std::string id;
    AntennaPose tx_pose;
    AntennaPose rx_pose;
    double tx_power_dbm = 0.0;
    double measured_power_dbm = 0.0;
    double frequency_ghz = 28.0;
};

/// Weight matrix W (M x 2N: penetration counts then reflection counts per
/// material) and residual vector A for the dB-domain least squares.
struct CalibrationSystem {
    std::vector<std::string> material_order;        // N material ids
    std::vector<std::vector<double>> weights;       // M rows of 2N counts
    std::vector<double> residuals;                  // A_j
    std::vector<std::string> record_ids;            // id of the record behind each row
    std::vector<std::string> dropped_records;       // unmatched or LOS-only, excluded
};

/// Fitted losses: penetration then reflection, dB, aligned with
/// material_order. Entries without any supporting interaction carry no
/// estimate.
struct LossVector {
    std::vector<std::optional<double>> penetration_db;
    std::vector<std::optional<double>> reflection_db;
    bool has_negative = false;  // some fitted loss came out below zero
    int rank = 0;               // numerical rank of the retained system
    bool rank_deficient = false;
};

struct SolveDiagnostics {
    double of_db_sum_sq = 0.0;  // sum of squared dB residuals at the solution
    double of_db_rms = 0.0;     // RMS per-record dB error
    std::vector<double> per_record_residual_db;
};

struct LinearSolveDiagnostics {
    double of_lin = 0.0;        // RMS of linear-power residuals at the solution
    double of_lin_initial = 0.0;  // same objective at the log-domain start point
    long moves_accepted = 0;
};

/// Runs a discovery-mode trace per record, matches the strongest measured
/// component by pointing direction, and assembles W and A. Unmatched and
/// LOS-only (all-zero-row) records are excluded and reported.
/// Throws std::runtime_error if no record yields a usable row.
CalibrationSystem assemble_system(const std::vector<MeasurementRecord> &records,
                                  const EnvironmentMap &env, const AntennaPattern &tx_pattern,
                                  const AntennaPattern &rx_pattern, TraceConfig config);

/// Closed-form dB-domain least squares: minimum-norm solution over columns
/// with at least one nonzero weight. Rank-deficient systems are solved via
/// pseudoinverse with a rank diagnostic.
LossVector solve_log_domain(const CalibrationSystem &system, SolveDiagnostics *diag = nullptr);

/// Linear-domain objective minimized by simulated annealing over linear
/// coefficients in (0, 1], initialized at the log-domain solution.
/// Deterministic for a fixed seed.
LossVector solve_linear_domain(const CalibrationSystem &system, uint64_t seed = 42,
                               LinearSolveDiagnostics *diag = nullptr);

/// Linear-domain objective (RMS of linear residuals) at a given loss vector.
double linear_objective(const CalibrationSystem &system, const LossVector &losses);
/// dB-domain sum-of-squares objective at a given loss vector.
double log_objective(const CalibrationSystem &system, const LossVector &losses);

enum class ErrorDistribution { Normal, Exponential, Rayleigh };

struct ErrorStatistics {
    double mean_db = 0.0;
    double std_db = 0.0;
    double abs_std_db = 0.0;  // standard deviation of |error|
    ErrorDistribution best_fit = ErrorDistribution::Normal;
    double sigma_hat = 0.0;   // fitted scale of the winning distribution
    bool degenerate = false;  // all residuals identical
};

/// Mean/std and the AIC-minimizing distribution among Normal (on the error),
/// Exponential and Rayleigh (both on |error|), closed-form ML fits.
/// Throws std::invalid_argument with fewer than 3 residuals.
ErrorStatistics error_statistics(const std::vector<double> &residuals_db);

const char *error_distribution_name(ErrorDistribution d);

}  // namespace mmray
