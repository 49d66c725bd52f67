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

#include "mmray/channel_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mmray {

namespace {
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
}

PowerDelayProfile synthesize_pdp(const std::vector<MultipathComponent> &components,
                                 double resolution_ns) {
    if (components.empty()) throw std::invalid_argument("synthesize_pdp: no components");
    if (resolution_ns <= 0.0) throw std::invalid_argument("synthesize_pdp: bad resolution");
    double t0 = components[0].tof_ns;
    for (const auto &c : components) t0 = std::min(t0, c.tof_ns);

    std::map<long, double> bins;
    for (const auto &c : components) {
        long idx = static_cast<long>(std::floor((c.tof_ns - t0) / resolution_ns));
        bins[idx] += dbm_to_mw(c.power_dbm);
    }
    PowerDelayProfile pdp;
    pdp.resolution_ns = resolution_ns;
    for (const auto &[idx, p] : bins)
        pdp.bins.push_back({t0 + (static_cast<double>(idx) + 0.5) * resolution_ns, p});
    return pdp;
}

double rms_delay_spread(const std::vector<MultipathComponent> &components) {
    if (components.empty()) throw std::invalid_argument("rms_delay_spread: no components");
    double psum = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto &c : components) {
        double p = dbm_to_mw(c.power_dbm);
        psum += p;
        m1 += p * c.tof_ns;
        m2 += p * c.tof_ns * c.tof_ns;
    }
    m1 /= psum;
    m2 /= psum;
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

double rms_angular_spread(const std::vector<MultipathComponent> &components, bool *degenerate) {
    if (components.empty()) throw std::invalid_argument("rms_angular_spread: no components");
    if (degenerate) *degenerate = false;
    double psum = 0.0, cx = 0.0, cy = 0.0;
    for (const auto &c : components) {
        double p = dbm_to_mw(c.power_dbm);
        double az = std::atan2(c.aoa.y, c.aoa.x);
        psum += p;
        cx += p * std::cos(az);
        cy += p * std::sin(az);
    }
    double r = std::sqrt(cx * cx + cy * cy) / psum;
    if (r < 1e-12) {
        if (degenerate) *degenerate = true;
        return kAngularSpreadCapDeg;
    }
    if (r >= 1.0) return 0.0;
    return rad2deg(std::sqrt(-2.0 * std::log(r)));
}

std::vector<SpreadComparisonRow> compare_statistics(const std::vector<SpreadReport> &measured,
                                                    const std::vector<SpreadReport> &simulated) {
    if (measured.size() != simulated.size())
        throw std::invalid_argument("compare_statistics: location lists differ in length");
    if (measured.empty()) throw std::invalid_argument("compare_statistics: empty lists");

    auto mean_std = [](const std::vector<SpreadReport> &v, auto field) {
        double mu = 0.0;
        for (const auto &r : v) mu += field(r);
        mu /= static_cast<double>(v.size());
        std::optional<double> sigma;
        if (v.size() >= 2) {
            double s = 0.0;
            for (const auto &r : v) s += (field(r) - mu) * (field(r) - mu);
            sigma = std::sqrt(s / static_cast<double>(v.size() - 1));
        }
        return std::make_pair(mu, sigma);
    };

    auto ds = [](const SpreadReport &r) { return r.rms_delay_spread_ns; };
    auto as = [](const SpreadReport &r) { return r.rms_angular_spread_deg; };

    std::vector<SpreadComparisonRow> rows;
    auto push = [&rows](const std::string &name, std::optional<double> m, std::optional<double> p) {
        std::optional<double> d;
        if (m && p) d = *m - *p;
        rows.push_back({name, m, p, d});
    };

    auto [ds_mu_m, ds_sig_m] = mean_std(measured, ds);
    auto [ds_mu_p, ds_sig_p] = mean_std(simulated, ds);
    auto [as_mu_m, as_sig_m] = mean_std(measured, as);
    auto [as_mu_p, as_sig_p] = mean_std(simulated, as);
    push("delay_spread_mu_ns", ds_mu_m, ds_mu_p);
    push("delay_spread_sigma_ns", ds_sig_m, ds_sig_p);
    push("angular_spread_mu_deg", as_mu_m, as_mu_p);
    push("angular_spread_sigma_deg", as_sig_m, as_sig_p);
    return rows;
}

}  // namespace mmray
