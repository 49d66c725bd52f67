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

#include "mmray/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mmray {

namespace {

struct EffectiveLosses {
    bool discovery = false;

    double reflection_db(const MaterialProfile &m) const {
        // Discovery initialization: Gamma = 0.9, i.e. -20 log10(0.9) dB per bounce.
        if (discovery) return -20.0 * std::log10(0.9);
        return std::max(0.0, m.reflection_loss_db);
    }
    std::optional<double> penetration_db(const MaterialProfile &m) const {
        if (m.opaque()) return std::nullopt;
        if (discovery) return 1.0;
        return std::max(0.0, *m.penetration_loss_db);
    }
};

double interaction_loss_db(const std::vector<Interaction> &interactions,
                           const EnvironmentMap &env, const EffectiveLosses &losses) {
    double total = 0.0;
    for (const Interaction &ia : interactions) {
        const MaterialProfile &m = env.materials.at(ia.material_id);
        if (ia.kind == InteractionKind::Reflection) {
            total += losses.reflection_db(m);
        } else if (ia.kind == InteractionKind::Penetration) {
            auto pen = losses.penetration_db(m);
            total += pen ? *pen : 1e30;  // opaque should never appear here
        }
    }
    return total;
}

struct IntVecHash {
    size_t operator()(const std::vector<int> &v) const {
        size_t h = 1469598103934665603ull;  // FNV-1a
        for (int x : v) {
            h ^= static_cast<size_t>(static_cast<unsigned>(x));
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct SbrContext {
    const EnvironmentMap &env;
    const TraceConfig &cfg;
    Vec3 rx;
    double alpha;            // launch angular spacing
    double optimistic_gain;  // TX + RX boresight gains, for pruning only
    EffectiveLosses losses;
    // Discovered reflection sequences (obstruction ids, in interaction order).
    // Penetrations are omitted: image correction re-derives them exactly.
    std::unordered_set<std::vector<int>, IntVecHash> candidates;
    TraceStats *stats;

    struct ScatterSeed {
        Vec3 point;
        int obstruction;
        Vec3 incident_dir;
        double incidence_angle;
        double seg1;  // unfolded TX-to-point length
        Signature tx_side;  // penetrations between TX and the scatter point
        double tx_side_loss_db;
    };
    std::vector<ScatterSeed> scatter_seeds;
    // One reusable crossing buffer per reflection depth; avoids a heap
    // allocation per walk node. Sized max_reflections + 1 before launch.
    std::vector<std::vector<Hit>> scratch;
    // DFS stack of reflection obstruction ids for the current walk branch.
    std::vector<int> rstack;
    // Per-obstruction effective losses, precomputed so the walk never touches
    // the string-keyed material map. pen_db < 0 marks an opaque surface.
    std::vector<double> refl_db;
    std::vector<double> pen_db;

    void precompute() {
        scratch.resize(static_cast<size_t>(cfg.max_reflections) + 1);
        refl_db.reserve(env.obstructions.size());
        pen_db.reserve(env.obstructions.size());
        for (const Obstruction &ob : env.obstructions) {
            const MaterialProfile &m = env.material_of(ob);
            refl_db.push_back(losses.reflection_db(m));
            auto pen = losses.penetration_db(m);
            pen_db.push_back(pen ? *pen : -1.0);
        }
    }
};

// One SBR walk step. Thin-wall penetration keeps the direction, so the whole
// penetration chain along this straight segment shares a single geometry
// query; only reflections recurse. Every traversed reflection sequence is a
// correction candidate (not just sequences of rays passing near the RX: a
// grid ray can follow the right wall sequence yet drift wide in long rooms).
// Invalid candidates are discarded exactly by correct_path.
void sbr_walk(SbrContext &ctx, const Vec3 &origin, const Vec3 &dir, int exclude, int n_refl,
              int n_pen, double cum_len, double loss_db, Signature &sig) {
    ctx.stats->hits_tested++;
    std::vector<Hit> &crossings = ctx.scratch[static_cast<size_t>(n_refl)];
    collect_crossings(origin, dir, 1e300, ctx.env, exclude, crossings);

    auto prune = [&](double cum, double added_loss) {
        if (ctx.cfg.discovery_mode) return false;
        double est = ctx.cfg.tx_power_dbm + ctx.optimistic_gain -
                     fspl_db(std::max(cum, 1e-3), ctx.cfg.frequency_ghz) - loss_db - added_loss;
        return est < ctx.cfg.rx_sensitivity_dbm;
    };

    double pen_loss = 0.0;
    size_t pushed = 0;
    for (const Hit &hit : crossings) {
        const size_t oi = static_cast<size_t>(hit.obstruction);
        const Obstruction &ob = ctx.env.obstructions[oi];
        double new_cum = cum_len + hit.distance;

        if (ctx.cfg.scattering_enabled && n_refl == 0) {
            const MaterialProfile &mat = ctx.env.material_of(ob);
            double wavelength = kSpeedOfLight / (ctx.cfg.frequency_ghz * 1e9);
            if (surface_scatters(mat, wavelength, hit.incidence_angle))
                ctx.scatter_seeds.push_back({hit.point, hit.obstruction, dir, hit.incidence_angle,
                                             new_cum, sig, loss_db + pen_loss});
        }

        if (n_refl < ctx.cfg.max_reflections) {
            double l = ctx.refl_db[oi];
            if (!prune(new_cum, pen_loss + l)) {
                ctx.rstack.push_back(hit.obstruction);
                ctx.candidates.insert(ctx.rstack);
                sbr_walk(ctx, hit.point, reflect(dir, ob.normal), hit.obstruction, n_refl + 1,
                         n_pen, new_cum, loss_db + pen_loss + l, sig);
                ctx.rstack.pop_back();
            }
        }

        double pen = ctx.pen_db[oi];
        if (pen < 0.0 || n_pen >= ctx.cfg.max_penetrations || prune(new_cum, pen_loss + pen))
            break;
        pen_loss += pen;
        ++n_pen;
        sig.push_back({hit.obstruction, InteractionKind::Penetration});
        ++pushed;
    }
    for (size_t i = 0; i < pushed; ++i) sig.pop_back();
}

}  // namespace

std::string signature_to_string(const Signature &sig, const EnvironmentMap &env) {
    std::ostringstream os;
    for (size_t i = 0; i < sig.size(); ++i) {
        if (i) os << '|';
        const char *k = sig[i].kind == InteractionKind::Reflection
                            ? "R"
                            : (sig[i].kind == InteractionKind::Penetration ? "P" : "S");
        os << k << ':' << env.obstructions[static_cast<size_t>(sig[i].obstruction)].id;
    }
    if (sig.empty()) os << "LOS";
    return os.str();
}

std::optional<CorrectedPath> correct_path(const Signature &signature, const Vec3 &tx,
                                          const Vec3 &rx, const EnvironmentMap &env,
                                          int max_penetrations) {
    std::vector<int> refl;
    for (const SignatureStep &s : signature)
        if (s.kind == InteractionKind::Reflection) refl.push_back(s.obstruction);

    const size_t m = refl.size();
    // TX images across the reflecting planes, in interaction order.
    std::vector<Vec3> images(m + 1);
    images[0] = tx;
    for (size_t k = 0; k < m; ++k) {
        const Obstruction &ob = env.obstructions[static_cast<size_t>(refl[k])];
        images[k + 1] = mirror_point(images[k], ob.vertices[0], ob.normal);
    }

    // Backtrack from RX toward successively shallower images.
    std::vector<Vec3> pts(m + 2);
    pts[0] = tx;
    pts[m + 1] = rx;
    Vec3 cur = rx;
    for (size_t k = m; k >= 1; --k) {
        const Obstruction &ob = env.obstructions[static_cast<size_t>(refl[k - 1])];
        Vec3 seg = images[k] - cur;
        double denom = seg.dot(ob.normal);
        if (std::abs(denom) < 1e-12) return std::nullopt;
        double t = (ob.plane_d - cur.dot(ob.normal)) / denom;
        if (t <= 1e-9 || t >= 1.0 - 1e-9) return std::nullopt;
        Vec3 p = cur + seg * t;
        if (!ob.box.contains(p) || !ob.contains_point(p)) return std::nullopt;
        pts[k] = p;
        cur = p;
    }

    CorrectedPath out;
    out.points = pts;
    int n_pen = 0;
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        Vec3 seg = pts[k + 1] - pts[k];
        double len = seg.norm();
        if (len < 1e-9) return std::nullopt;
        Vec3 dir = seg / len;
        out.length += len;

        // Interior crossings: must be penetrable, become penetration records.
        for (const Hit &h : collect_crossings(pts[k], dir, len - 1e-6, env)) {
            if (h.distance < 1e-6) continue;
            bool at_reflection = (k >= 1 && h.obstruction == refl[k - 1] &&
                                  (h.point - pts[k]).norm() < 1e-6) ||
                                 (k + 1 <= m && h.obstruction == refl[k] &&
                                  (h.point - pts[k + 1]).norm() < 1e-6);
            if (at_reflection) continue;
            const Obstruction &ob = env.obstructions[static_cast<size_t>(h.obstruction)];
            const MaterialProfile &mat = env.material_of(ob);
            if (mat.opaque()) return std::nullopt;
            if (++n_pen > max_penetrations) return std::nullopt;
            out.interactions.push_back({InteractionKind::Penetration, h.obstruction,
                                        mat.name, h.point, h.incidence_angle});
        }
        if (k + 1 <= m) {
            const Obstruction &ob = env.obstructions[static_cast<size_t>(refl[k])];
            double c = std::min(1.0, std::abs(dir.dot(ob.normal)));
            out.interactions.push_back({InteractionKind::Reflection, refl[k],
                                        env.material_of(ob).name, pts[k + 1], std::acos(c)});
        }
    }
    for (const Interaction &ia : out.interactions) out.signature.push_back({ia.obstruction, ia.kind});
    out.aod = (pts[1] - tx).normalized();
    out.aoa = (pts[m] - rx).normalized();
    return out;
}

std::vector<MultipathComponent> dedup_components(std::vector<MultipathComponent> raw) {
    std::map<Signature, MultipathComponent> by_sig;
    for (MultipathComponent &c : raw) by_sig.try_emplace(c.signature, std::move(c));
    std::vector<MultipathComponent> out;
    out.reserve(by_sig.size());
    for (auto &[sig, c] : by_sig) out.push_back(std::move(c));
    std::sort(out.begin(), out.end(), [](const MultipathComponent &a, const MultipathComponent &b) {
        if (a.power_dbm != b.power_dbm) return a.power_dbm > b.power_dbm;
        return a.signature < b.signature;
    });
    return out;
}

std::vector<ComponentMatch> match_components(const std::vector<MultipathComponent> &simulated,
                                             const std::vector<MeasuredDirection> &measured,
                                             double threshold_rad) {
    std::vector<ComponentMatch> out;
    out.reserve(measured.size());
    for (size_t j = 0; j < measured.size(); ++j) {
        ComponentMatch best;
        best.measured_index = static_cast<int>(j);
        double best_dev = 1e300;
        for (size_t k = 0; k < simulated.size(); ++k) {
            double dev = angle_between(simulated[k].aoa, measured[j].aoa) +
                         angle_between(simulated[k].aod, measured[j].aod);
            if (dev < best_dev) {
                best_dev = dev;
                best.simulated_index = static_cast<int>(k);
            }
        }
        best.deviation_rad = best_dev;
        if (best.simulated_index < 0 || best_dev > threshold_rad) best.simulated_index = -1;
        out.push_back(best);
    }
    return out;
}

TraceResult trace(const EnvironmentMap &env, const AntennaPose &tx, const AntennaPose &rx,
                  const AntennaPattern &tx_pattern, const AntennaPattern &rx_pattern,
                  const TraceConfig &config) {
    if ((tx.position - rx.position).norm() < 1e-9)
        throw std::invalid_argument("trace: TX and RX coincide");
    if (!env.in_bounds(tx.position) || !env.in_bounds(rx.position))
        throw std::invalid_argument("trace: TX or RX outside environment bounds");

    TraceResult result;
    EffectiveLosses losses{config.discovery_mode};
    std::vector<MultipathComponent> raw;

    auto finish_component = [&](const std::vector<Vec3> &pts, double length, const Vec3 &aod,
                                const Vec3 &aoa, std::vector<Interaction> interactions,
                                Signature sig) {
        MultipathComponent c;
        c.points = pts;
        c.path_length_m = length;
        c.tof_ns = length / kSpeedOfLight * 1e9;
        c.aod = aod;
        c.aoa = aoa;
        c.power_dbm = config.tx_power_dbm + gain_toward(tx_pattern, tx, aod) +
                      gain_toward(rx_pattern, rx, aoa) - fspl_db(length, config.frequency_ghz) -
                      interaction_loss_db(interactions, env, losses);
        c.interactions = std::move(interactions);
        c.signature = std::move(sig);
        if (config.discovery_mode || c.power_dbm >= config.rx_sensitivity_dbm)
            raw.push_back(std::move(c));
    };

    // Direct path (LOS or penetration-only), exact geometry.
    {
        Vec3 seg = rx.position - tx.position;
        double len = seg.norm();
        Vec3 dir = seg / len;
        auto crossings = collect_crossings(tx.position, dir, len - 1e-9, env);
        result.los_blocked = !crossings.empty();
        bool ok = static_cast<int>(crossings.size()) <= config.max_penetrations;
        std::vector<Interaction> interactions;
        Signature sig;
        for (const Hit &h : crossings) {
            const MaterialProfile &mat =
                env.material_of(env.obstructions[static_cast<size_t>(h.obstruction)]);
            if (mat.opaque()) {
                ok = false;
                break;
            }
            interactions.push_back(
                {InteractionKind::Penetration, h.obstruction, mat.name, h.point, h.incidence_angle});
            sig.push_back({h.obstruction, InteractionKind::Penetration});
        }
        if (ok)
            finish_component({tx.position, rx.position}, len, dir, -dir, std::move(interactions),
                             std::move(sig));
    }

    // SBR discovery of candidate surface signatures.
    Tessellation tess = tessellate_icosahedron(config.tessellation_frequency);
    SbrContext ctx{env, config, rx.position, tess.angular_spacing_rad,
                   tx_pattern.boresight_gain_dbi + rx_pattern.boresight_gain_dbi, losses,
                   {}, &result.stats, {}, {}, {}, {}, {}};
    ctx.precompute();
    Signature sig;
    for (const Vec3 &d : tess.directions) {
        result.stats.rays_launched++;
        sbr_walk(ctx, tx.position, d, -1, 0, 0, 0.0, 0.0, sig);
    }

    // Image-correction of every discovered reflection sequence.
    for (const std::vector<int> &rseq : ctx.candidates) {
        Signature cand;
        for (int ob : rseq) cand.push_back({ob, InteractionKind::Reflection});
        auto cp = correct_path(cand, tx.position, rx.position, env, config.max_penetrations);
        if (!cp) continue;
        finish_component(cp->points, cp->length, cp->aod, cp->aoa, std::move(cp->interactions),
                         std::move(cp->signature));
    }

    // Single-scatter components: strongest seed per surface signature survives dedup.
    if (config.scattering_enabled) {
        std::vector<MultipathComponent> scat;
        for (const auto &seed : ctx.scatter_seeds) {
            Vec3 to_rx = rx.position - seed.point;
            double s2 = to_rx.norm();
            if (s2 < 1e-6) continue;
            Vec3 dir2 = to_rx / s2;
            auto crossings = collect_crossings(seed.point, dir2, s2 - 1e-9, env, seed.obstruction);
            double rx_side_loss = 0.0;
            Signature rx_pens;
            std::vector<Interaction> rx_inter;
            bool ok = true;
            for (const Hit &h : crossings) {
                const MaterialProfile &mat =
                    env.material_of(env.obstructions[static_cast<size_t>(h.obstruction)]);
                auto pen = losses.penetration_db(mat);
                if (!pen) {
                    ok = false;
                    break;
                }
                rx_side_loss += *pen;
                rx_pens.push_back({h.obstruction, InteractionKind::Penetration});
                rx_inter.push_back({InteractionKind::Penetration, h.obstruction, mat.name, h.point,
                                    h.incidence_angle});
            }
            if (!ok) continue;

            const Obstruction &ob = env.obstructions[static_cast<size_t>(seed.obstruction)];
            Vec3 spec = reflect(seed.incident_dir, ob.normal);
            double psi_f = angle_between(dir2, spec);
            double psi_b = angle_between(dir2, -seed.incident_dir);
            double lobe = scatter_gain(psi_f, psi_b, config.scattering);
            if (lobe < 1e-20) continue;

            Vec3 aod = (seed.point - tx.position).normalized();
            double incident = config.tx_power_dbm + gain_toward(tx_pattern, tx, aod) -
                              fspl_db(seed.seg1, config.frequency_ghz) - seed.tx_side_loss_db;
            Vec3 aoa = -dir2;
            double p = scattered_power_dbm(incident, seed.seg1, s2, lobe, config.scattering,
                                           config.frequency_ghz) -
                       rx_side_loss + gain_toward(rx_pattern, rx, aoa);
            if (!config.discovery_mode && p < config.rx_sensitivity_dbm) continue;

            MultipathComponent c;
            c.points = {tx.position, seed.point, rx.position};
            c.path_length_m = seed.seg1 + s2;
            c.tof_ns = c.path_length_m / kSpeedOfLight * 1e9;
            c.aod = aod;
            c.aoa = aoa;
            c.power_dbm = p;
            const MaterialProfile &smat = env.material_of(ob);
            c.signature = seed.tx_side;
            c.signature.push_back({seed.obstruction, InteractionKind::Scattering});
            for (const SignatureStep &s : rx_pens) c.signature.push_back(s);
            c.interactions.push_back({InteractionKind::Scattering, seed.obstruction, smat.name,
                                      seed.point, seed.incidence_angle});
            for (Interaction &ia : rx_inter) c.interactions.push_back(std::move(ia));
            scat.push_back(std::move(c));
        }
        // Strongest seed first so dedup keeps it.
        std::sort(scat.begin(), scat.end(), [](const MultipathComponent &a,
                                               const MultipathComponent &b) {
            if (a.signature != b.signature) return a.signature < b.signature;
            return a.power_dbm > b.power_dbm;
        });
        Signature last;
        bool first = true;
        for (MultipathComponent &c : scat) {
            if (first || c.signature != last) {
                last = c.signature;
                first = false;
                raw.push_back(std::move(c));
            }
        }
    }

    result.stats.candidates = static_cast<long>(raw.size());
    result.components = dedup_components(std::move(raw));
    result.stats.components = static_cast<long>(result.components.size());
    return result;
}

}  // namespace mmray
