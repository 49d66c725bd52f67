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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmray/propagation.hpp"
#include "mmray/vec3.hpp"

namespace mmray {

/// Minimum accepted hit distance; avoids self-intersection at interaction points.
inline constexpr double kMinHitDistance = 1e-9;

struct Aabb {
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};

    void expand(const Vec3 &p);
    bool contains(const Vec3 &p) const;
    bool empty() const { return lo.x > hi.x; }
};

/// One planar polygonal obstruction. Vertices are coplanar and ordered
/// counterclockwise with respect to the outward normal. Polygons are
/// intersectable from both sides; the normal fixes bookkeeping only.
struct Obstruction {
    std::string id;
    std::vector<Vec3> vertices;
    std::string material_id;
    Vec3 normal;        // unit
    double plane_d = 0.0;  // normal . vertices[0]
    Aabb box;
    int proj_axis = 2;  // dominant axis of the normal; polygon tested in the other two

    /// Computes normal/plane/box/projection from vertices; validates
    /// coplanarity (1e-6 m) and vertex count. Throws std::invalid_argument.
    void finalize();

    /// Point-in-polygon test in the projected plane (crossing number).
    /// The point is assumed to lie on the polygon's plane.
    bool contains_point(const Vec3 &p) const;
};

struct EnvironmentMap {
    std::vector<Obstruction> obstructions;
    std::map<std::string, MaterialProfile> materials;
    Aabb bounds;

    // Structure-of-arrays plane data, prepared once for the intersection kernels.
    std::vector<double> plane_nx, plane_ny, plane_nz, plane_d;

    /// Validates material references, computes bounds, builds kernel data.
    /// Throws std::invalid_argument on a dangling material reference.
    void finalize();

    const MaterialProfile &material_of(const Obstruction &o) const;

    /// An empty environment has unbounded extent; otherwise a point must lie
    /// inside the vertex bounding box inflated by max(10 m, scene diagonal).
    bool in_bounds(const Vec3 &p) const;
};

struct Hit {
    Vec3 point;
    int obstruction = -1;
    double distance = 0.0;
    double incidence_angle = 0.0;  // from the surface normal, in [0, pi/2]
};

/// Nearest intersection of the ray with any obstruction polygon strictly ahead
/// of the origin, skipping `exclude` (the surface just departed).
/// Dispatches to the best available kernel (scalar / AVX2); all kernels are
/// bitwise-equivalent to the brute-force scalar scan.
std::optional<Hit> intersect_ray(const Vec3 &origin, const Vec3 &direction,
                                 const EnvironmentMap &env, int exclude = -1);

/// Name of the kernel selected at runtime ("scalar" or "avx2").
const char *intersect_backend();
/// Force the scalar reference kernel (used by equivalence tests).
void set_force_scalar(bool force);

/// All crossings of the segment from origin along direction up to max_dist,
/// sorted by distance. Used for penetration walks and path validation.
std::vector<Hit> collect_crossings(const Vec3 &origin, const Vec3 &direction,
                                   double max_dist, const EnvironmentMap &env,
                                   int exclude = -1);

/// In-place variant: clears `out` and fills it with the sorted crossings.
/// Lets hot loops reuse one buffer instead of allocating per call.
void collect_crossings(const Vec3 &origin, const Vec3 &direction, double max_dist,
                       const EnvironmentMap &env, int exclude, std::vector<Hit> &out);

/// Directions generated by subdividing an icosahedron and projecting to the
/// unit sphere. Canonical orientation: two vertices on the +/-z axis.
struct Tessellation {
    int frequency = 1;                 // N_t
    std::vector<Vec3> directions;      // 10*N_t^2 + 2 unit vectors
    double angular_spacing_rad = 0.0;  // nominal, deg2rad(69)/N_t
};

/// Throws std::invalid_argument if frequency < 1.
Tessellation tessellate_icosahedron(int frequency);

/// Subset of tessellate_icosahedron directions with nonnegative dot product
/// against plane_normal. Throws std::invalid_argument on a zero normal.
Tessellation tessellate_half_icosahedron(int frequency, const Vec3 &plane_normal);

/// Reception sphere radius alpha*d/sqrt(3). Throws on nonpositive input.
double reception_sphere_radius(double angular_spacing_rad, double path_length_m);

}  // namespace mmray
