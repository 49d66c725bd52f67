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

#include "mmray/calibration.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mmray {

namespace {

size_t material_index(const std::vector<std::string> &order, const std::string &name) {
    auto it = std::find(order.begin(), order.end(), name);
    return static_cast<size_t>(it - order.begin());
}

std::vector<double> losses_as_flat(const CalibrationSystem &sys, const LossVector &l) {
    size_t n = sys.material_order.size();
    std::vector<double> flat(2 * n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        if (l.penetration_db[i]) flat[i] = *l.penetration_db[i];
        if (l.reflection_db[i]) flat[n + i] = *l.reflection_db[i];
    }
    return flat;
}

}  // namespace

CalibrationSystem assemble_system(const std::vector<MeasurementRecord> &records,
                                  const EnvironmentMap &env, const AntennaPattern &tx_pattern,
                                  const AntennaPattern &rx_pattern, TraceConfig config) {
    if (records.empty()) throw std::runtime_error("assemble_system: no measurement records");
    config.discovery_mode = true;

    CalibrationSystem sys;
    for (const auto &[name, mat] : env.materials) sys.material_order.push_back(name);
    const size_t n = sys.material_order.size();

    double threshold_rad = config.match_threshold_hpbw *
                           deg2rad(0.5 * (tx_pattern.hpbw_deg + rx_pattern.hpbw_deg));

    for (const MeasurementRecord &rec : records) {
        config.frequency_ghz = rec.frequency_ghz;
        config.tx_power_dbm = rec.tx_power_dbm;
        TraceResult tr = trace(env, rec.tx_pose, rec.rx_pose, tx_pattern, rx_pattern, config);

        std::vector<MeasuredDirection> meas{{rec.rx_pose.boresight, rec.tx_pose.boresight,
                                             rec.measured_power_dbm}};
        auto matches = match_components(tr.components, meas, threshold_rad);
        if (matches.empty() || matches[0].simulated_index < 0) {
            sys.dropped_records.push_back(rec.id + " (unmatched)");
            continue;
        }
        const MultipathComponent &c =
            tr.components[static_cast<size_t>(matches[0].simulated_index)];

        std::vector<double> row(2 * n, 0.0);
        for (const Interaction &ia : c.interactions) {
            size_t i = material_index(sys.material_order, ia.material_id);
            if (ia.kind == InteractionKind::Penetration) row[i] += 1.0;
            if (ia.kind == InteractionKind::Reflection) row[n + i] += 1.0;
        }
        bool all_zero = std::all_of(row.begin(), row.end(), [](double w) { return w == 0.0; });
        if (all_zero) {
            sys.dropped_records.push_back(rec.id + " (LOS-only, no unknowns)");
            continue;
        }

        double a = rec.tx_power_dbm + gain_toward(tx_pattern, rec.tx_pose, c.aod) +
                   gain_toward(rx_pattern, rec.rx_pose, c.aoa) -
                   fspl_db(c.path_length_m, rec.frequency_ghz) - rec.measured_power_dbm;
        sys.weights.push_back(std::move(row));
        sys.residuals.push_back(a);
        sys.record_ids.push_back(rec.id);
    }
    if (sys.weights.empty())
        throw std::runtime_error("assemble_system: no record produced a usable calibration row");
    return sys;
}

LossVector solve_log_domain(const CalibrationSystem &sys, SolveDiagnostics *diag) {
    const size_t m = sys.weights.size();
    const size_t n = sys.material_order.size();
    const size_t cols = 2 * n;

    // Retain only columns touched by at least one path.
    std::vector<size_t> retained;
    for (size_t c = 0; c < cols; ++c)
        for (size_t r = 0; r < m; ++r)
            if (sys.weights[r][c] != 0.0) {
                retained.push_back(c);
                break;
            }

    Eigen::MatrixXd W(m, static_cast<Eigen::Index>(retained.size()));
    Eigen::VectorXd A(m);
    for (size_t r = 0; r < m; ++r) {
        A(static_cast<Eigen::Index>(r)) = sys.residuals[r];
        for (size_t c = 0; c < retained.size(); ++c)
            W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                sys.weights[r][retained[c]];
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(W);
    Eigen::VectorXd sol = cod.solve(A);

    LossVector out;
    out.penetration_db.assign(n, std::nullopt);
    out.reflection_db.assign(n, std::nullopt);
    out.rank = static_cast<int>(cod.rank());
    out.rank_deficient = cod.rank() < static_cast<Eigen::Index>(retained.size());
    for (size_t c = 0; c < retained.size(); ++c) {
        double v = sol(static_cast<Eigen::Index>(c));
        if (v < 0.0) out.has_negative = true;
        if (retained[c] < n)
            out.penetration_db[retained[c]] = v;
        else
            out.reflection_db[retained[c] - n] = v;
    }

    if (diag) {
        Eigen::VectorXd res = A - W * sol;
        diag->per_record_residual_db.assign(res.data(), res.data() + res.size());
        diag->of_db_sum_sq = res.squaredNorm();
        diag->of_db_rms = std::sqrt(res.squaredNorm() / static_cast<double>(m));
    }
    return out;
}

double log_objective(const CalibrationSystem &sys, const LossVector &losses) {
    auto flat = losses_as_flat(sys, losses);
    double sum = 0.0;
    for (size_t r = 0; r < sys.weights.size(); ++r) {
        double pred = 0.0;
        for (size_t c = 0; c < flat.size(); ++c) pred += sys.weights[r][c] * flat[c];
        double e = sys.residuals[r] - pred;
        sum += e * e;
    }
    return sum;
}

double linear_objective(const CalibrationSystem &sys, const LossVector &losses) {
    auto flat = losses_as_flat(sys, losses);
    double sum = 0.0;
    for (size_t r = 0; r < sys.weights.size(); ++r) {
        double b = std::pow(10.0, -sys.residuals[r] / 10.0);
        double model_db = 0.0;
        for (size_t c = 0; c < flat.size(); ++c) model_db += sys.weights[r][c] * flat[c];
        double e = b - std::pow(10.0, -model_db / 10.0);
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(sys.weights.size()));
}

LossVector solve_linear_domain(const CalibrationSystem &sys, uint64_t seed,
                               LinearSolveDiagnostics *diag) {
    LossVector start = solve_log_domain(sys);
    const size_t n = sys.material_order.size();

    // Coordinates under optimization: linear coefficients in (0, 1].
    struct Coord {
        bool is_pen;
        size_t mat;
    };
    std::vector<Coord> coords;
    std::vector<double> l;
    auto to_linear = [](double db) {
        return std::clamp(std::pow(10.0, -db / 10.0), 1e-12, 1.0);
    };
    for (size_t i = 0; i < n; ++i) {
        if (start.penetration_db[i]) {
            coords.push_back({true, i});
            l.push_back(to_linear(*start.penetration_db[i]));
        }
        if (start.reflection_db[i]) {
            coords.push_back({false, i});
            l.push_back(to_linear(*start.reflection_db[i]));
        }
    }

    auto to_losses = [&](const std::vector<double> &lv) {
        LossVector out;
        out.penetration_db.assign(n, std::nullopt);
        out.reflection_db.assign(n, std::nullopt);
        for (size_t c = 0; c < coords.size(); ++c) {
            double db = -10.0 * std::log10(lv[c]);
            if (coords[c].is_pen)
                out.penetration_db[coords[c].mat] = db;
            else
                out.reflection_db[coords[c].mat] = db;
        }
        return out;
    };

    double e0 = linear_objective(sys, to_losses(l));
    if (diag) diag->of_lin_initial = e0;
    if (coords.empty()) {
        if (diag) diag->of_lin = e0;
        return start;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 0.05);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<size_t> pick(0, coords.size() - 1);

    auto propose = [&](std::vector<double> cur) {
        size_t c = pick(rng);
        cur[c] = std::clamp(cur[c] * std::exp(step(rng)), 1e-12, 1.0);
        return cur;
    };

    // T0 from a pilot sample so initial uphill acceptance is about 0.8.
    double mean_uphill = 0.0;
    int uphill = 0;
    for (int i = 0; i < 50; ++i) {
        double e = linear_objective(sys, to_losses(propose(l)));
        if (e > e0) {
            mean_uphill += e - e0;
            uphill++;
        }
    }
    double t = (uphill > 0) ? (mean_uphill / uphill) / std::log(1.0 / 0.8) : 1e-6;

    std::vector<double> cur = l, best = l;
    double e_cur = e0, e_best = e0;
    long accepted = 0;
    for (int k = 0; k < 200; ++k, t *= 0.95) {
        for (int mv = 0; mv < 50; ++mv) {
            auto cand = propose(cur);
            double e = linear_objective(sys, to_losses(cand));
            double de = e - e_cur;
            if (de <= 0.0 || unif(rng) < std::exp(-de / t)) {
                cur = std::move(cand);
                e_cur = e;
                accepted++;
                if (e_cur < e_best) {
                    best = cur;
                    e_best = e_cur;
                }
            }
        }
    }

    LossVector out = to_losses(best);
    out.rank = start.rank;
    out.rank_deficient = start.rank_deficient;
    if (diag) {
        diag->of_lin = e_best;
        diag->moves_accepted = accepted;
    }
    return out;
}

const char *error_distribution_name(ErrorDistribution d) {
    switch (d) {
        case ErrorDistribution::Normal: return "normal";
        case ErrorDistribution::Exponential: return "exponential";
        default: return "rayleigh";
    }
}

ErrorStatistics error_statistics(const std::vector<double> &residuals_db) {
    if (residuals_db.size() < 3)
        throw std::invalid_argument("error_statistics: need at least 3 residuals");
    const double nd = static_cast<double>(residuals_db.size());

    ErrorStatistics st;
    for (double e : residuals_db) st.mean_db += e;
    st.mean_db /= nd;
    double var = 0.0;
    for (double e : residuals_db) var += (e - st.mean_db) * (e - st.mean_db);
    var /= nd;
    st.std_db = std::sqrt(var);

    double abs_mean = 0.0;
    for (double e : residuals_db) abs_mean += std::abs(e);
    abs_mean /= nd;
    double abs_var = 0.0;
    for (double e : residuals_db) abs_var += (std::abs(e) - abs_mean) * (std::abs(e) - abs_mean);
    abs_var /= nd;
    st.abs_std_db = std::sqrt(abs_var);

    if (st.std_db < 1e-12) {
        st.degenerate = true;
        st.best_fit = ErrorDistribution::Normal;
        st.sigma_hat = 0.0;
        return st;
    }

    // Closed-form ML fits; AIC = 2k - 2 ln L. The Exponential and Rayleigh
    // candidates are parameterized on |error| and evaluated as symmetric
    // densities on the signed error (factor 1/2 per sample) so all three
    // likelihoods live on the same support.
    double ll_normal = -nd / 2.0 * std::log(2.0 * kPi * var) - nd / 2.0;
    double aic_normal = 2.0 * 2.0 - 2.0 * ll_normal;

    double lambda = 1.0 / std::max(abs_mean, 1e-12);
    double ll_exp = nd * (std::log(lambda) - 1.0) - nd * std::log(2.0);
    double aic_exp = 2.0 * 1.0 - 2.0 * ll_exp;

    double sum_sq = 0.0;
    for (double e : residuals_db) sum_sq += e * e;
    double ray_s2 = sum_sq / (2.0 * nd);
    double ll_ray = 0.0;
    for (double e : residuals_db) {
        double x = std::max(std::abs(e), 1e-12);
        ll_ray += std::log(x / ray_s2) - x * x / (2.0 * ray_s2);
    }
    ll_ray -= nd * std::log(2.0);
    double aic_ray = 2.0 * 1.0 - 2.0 * ll_ray;

    st.best_fit = ErrorDistribution::Normal;
    st.sigma_hat = st.std_db;
    double best_aic = aic_normal;
    if (aic_exp < best_aic) {
        best_aic = aic_exp;
        st.best_fit = ErrorDistribution::Exponential;
        st.sigma_hat = 1.0 / lambda;
    }
    if (aic_ray < best_aic) {
        st.best_fit = ErrorDistribution::Rayleigh;
        st.sigma_hat = std::sqrt(ray_s2);
    }
    return st;
}

}  // namespace mmray
