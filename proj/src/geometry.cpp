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

#include "mmray/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>

namespace mmray {

void Aabb::expand(const Vec3 &p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
}

bool Aabb::contains(const Vec3 &p) const {
    constexpr double eps = 1e-6;
    return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps && p.y <= hi.y + eps &&
           p.z >= lo.z - eps && p.z <= hi.z + eps;
}

void Obstruction::finalize() {
    if (vertices.size() < 3)
        throw std::invalid_argument("obstruction '" + id + "': needs at least 3 vertices");
    Vec3 n = (vertices[1] - vertices[0]).cross(vertices[2] - vertices[0]);
    if (n.norm() < 1e-12)
        throw std::invalid_argument("obstruction '" + id + "': degenerate polygon");
    normal = n.normalized();
    plane_d = normal.dot(vertices[0]);
    box = Aabb{};
    for (const Vec3 &v : vertices) {
        if (std::abs(normal.dot(v) - plane_d) > 1e-6)
            throw std::invalid_argument("obstruction '" + id + "': vertices not coplanar");
        box.expand(v);
    }
    double ax = std::abs(normal.x), ay = std::abs(normal.y), az = std::abs(normal.z);
    proj_axis = (ax >= ay && ax >= az) ? 0 : (ay >= az ? 1 : 2);
}

namespace {
inline void project2d(const Vec3 &p, int axis, double &u, double &v) {
    switch (axis) {
        case 0: u = p.y; v = p.z; break;
        case 1: u = p.x; v = p.z; break;
        default: u = p.x; v = p.y; break;
    }
}
}  // namespace

bool Obstruction::contains_point(const Vec3 &p) const {
    double pu, pv;
    project2d(p, proj_axis, pu, pv);
    bool inside = false;
    size_t n = vertices.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        double au, av, bu, bv;
        project2d(vertices[i], proj_axis, au, av);
        project2d(vertices[j], proj_axis, bu, bv);
        if ((av > pv) != (bv > pv)) {
            double xint = au + (pv - av) * (bu - au) / (bv - av);
            if (pu < xint) inside = !inside;
        }
    }
    return inside;
}

void EnvironmentMap::finalize() {
    bounds = Aabb{};
    plane_nx.clear();
    plane_ny.clear();
    plane_nz.clear();
    plane_d.clear();
    for (Obstruction &ob : obstructions) {
        ob.finalize();
        if (!materials.count(ob.material_id))
            throw std::invalid_argument("obstruction '" + ob.id + "': unknown material '" +
                                        ob.material_id + "'");
        for (const Vec3 &v : ob.vertices) bounds.expand(v);
        plane_nx.push_back(ob.normal.x);
        plane_ny.push_back(ob.normal.y);
        plane_nz.push_back(ob.normal.z);
        plane_d.push_back(ob.plane_d);
    }
}

const MaterialProfile &EnvironmentMap::material_of(const Obstruction &o) const {
    return materials.at(o.material_id);
}

bool EnvironmentMap::in_bounds(const Vec3 &p) const {
    if (bounds.empty()) return true;
    // Inflated by max(10 m, scene diagonal) so endpoints near, but not on,
    // sparse geometry (a single wall, say) still count as in scene.
    double margin = std::max(10.0, (bounds.hi - bounds.lo).norm());
    Aabb inflated = bounds;
    inflated.lo = inflated.lo - Vec3{margin, margin, margin};
    inflated.hi = inflated.hi + Vec3{margin, margin, margin};
    return inflated.contains(p);
}

void collect_crossings(const Vec3 &origin, const Vec3 &direction, double max_dist,
                       const EnvironmentMap &env, int exclude, std::vector<Hit> &out) {
    out.clear();
    for (size_t i = 0; i < env.obstructions.size(); ++i) {
        if (static_cast<int>(i) == exclude) continue;
        const Obstruction &ob = env.obstructions[i];
        double denom = direction.dot(ob.normal);
        if (std::abs(denom) < 1e-12) continue;
        double t = (ob.plane_d - origin.dot(ob.normal)) / denom;
        if (t <= kMinHitDistance || t >= max_dist) continue;
        Vec3 p = origin + direction * t;
        if (!ob.box.contains(p) || !ob.contains_point(p)) continue;
        double c = std::min(1.0, std::abs(denom));
        out.push_back(Hit{p, static_cast<int>(i), t, std::acos(c)});
    }
    std::sort(out.begin(), out.end(),
              [](const Hit &a, const Hit &b) { return a.distance < b.distance; });
}

std::vector<Hit> collect_crossings(const Vec3 &origin, const Vec3 &direction, double max_dist,
                                   const EnvironmentMap &env, int exclude) {
    std::vector<Hit> hits;
    collect_crossings(origin, direction, max_dist, env, exclude, hits);
    return hits;
}

namespace {

std::vector<Vec3> icosahedron_vertices() {
    std::vector<Vec3> v;
    v.reserve(12);
    v.push_back({0.0, 0.0, 1.0});
    const double h = 1.0 / std::sqrt(5.0);
    const double r = 2.0 / std::sqrt(5.0);
    for (int k = 0; k < 5; ++k) {
        double a = 2.0 * kPi * k / 5.0;
        v.push_back({r * std::cos(a), r * std::sin(a), h});
    }
    for (int k = 0; k < 5; ++k) {
        double a = 2.0 * kPi * k / 5.0 + kPi / 5.0;
        v.push_back({r * std::cos(a), r * std::sin(a), -h});
    }
    v.push_back({0.0, 0.0, -1.0});
    return v;
}

constexpr int kFaces[20][3] = {
    {0, 1, 2},  {0, 2, 3},  {0, 3, 4},  {0, 4, 5},  {0, 5, 1},   // north cap
    {1, 6, 2},  {2, 7, 3},  {3, 8, 4},  {4, 9, 5},  {5, 10, 1},  // upper band
    {6, 7, 2},  {7, 8, 3},  {8, 9, 4},  {9, 10, 5}, {10, 6, 1},  // lower band
    {11, 7, 6}, {11, 8, 7}, {11, 9, 8}, {11, 10, 9}, {11, 6, 10}};  // south cap

}  // namespace

Tessellation tessellate_icosahedron(int frequency) {
    if (frequency < 1) throw std::invalid_argument("tessellation frequency must be >= 1");
    const auto ico = icosahedron_vertices();
    Tessellation tess;
    tess.frequency = frequency;
    tess.angular_spacing_rad = deg2rad(69.0) / frequency;

    // Shared edge/corner vertices from adjacent faces land within float
    // roundoff of each other while distinct directions are >= alpha apart;
    // a 1e-7 quantization key separates the two regimes for any N_t <= 10^4.
    std::map<std::tuple<int64_t, int64_t, int64_t>, size_t> seen;
    const double q = 1e7;
    for (const auto &f : kFaces) {
        const Vec3 &a = ico[f[0]], &b = ico[f[1]], &c = ico[f[2]];
        for (int i = 0; i <= frequency; ++i) {
            for (int j = 0; j <= frequency - i; ++j) {
                int k = frequency - i - j;
                Vec3 p = (a * static_cast<double>(i) + b * static_cast<double>(j) +
                          c * static_cast<double>(k)) /
                         static_cast<double>(frequency);
                p = p.normalized();
                auto key = std::make_tuple(static_cast<int64_t>(std::llround(p.x * q)),
                                           static_cast<int64_t>(std::llround(p.y * q)),
                                           static_cast<int64_t>(std::llround(p.z * q)));
                if (seen.emplace(key, tess.directions.size()).second) tess.directions.push_back(p);
            }
        }
    }
    return tess;
}

Tessellation tessellate_half_icosahedron(int frequency, const Vec3 &plane_normal) {
    if (plane_normal.norm() < 1e-12) throw std::invalid_argument("zero plane normal");
    Vec3 n = plane_normal.normalized();
    Tessellation full = tessellate_icosahedron(frequency);
    Tessellation half;
    half.frequency = full.frequency;
    half.angular_spacing_rad = full.angular_spacing_rad;
    for (const Vec3 &d : full.directions)
        if (d.dot(n) >= -1e-12) half.directions.push_back(d);
    return half;
}

double reception_sphere_radius(double angular_spacing_rad, double path_length_m) {
    if (angular_spacing_rad <= 0.0 || path_length_m <= 0.0)
        throw std::invalid_argument("reception_sphere_radius: arguments must be positive");
    return angular_spacing_rad * path_length_m / std::sqrt(3.0);
}

}  // namespace mmray
