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

// Shared accept path for the ray/polygon intersection kernels. The SIMD
// variants only vectorize the plane-distance computation; candidate
// acceptance goes through this scalar code so every kernel stays
// bitwise-equivalent to the brute-force scan.

#include "mmray/geometry.hpp"

namespace mmray::detail {

struct KernelResult {
    double t = 1e300;
    int index = -1;
};

// Polygon containment with a small box margin against edge roundoff.
inline bool accept_candidate(const EnvironmentMap &env, int i, const Vec3 &origin,
                             const Vec3 &dir, double t, KernelResult &best) {
    if (t <= kMinHitDistance || t >= best.t) return false;
    const Obstruction &ob = env.obstructions[static_cast<size_t>(i)];
    Vec3 p = origin + dir * t;
    constexpr double box_eps = 1e-9;
    if (p.x < ob.box.lo.x - box_eps || p.x > ob.box.hi.x + box_eps ||
        p.y < ob.box.lo.y - box_eps || p.y > ob.box.hi.y + box_eps ||
        p.z < ob.box.lo.z - box_eps || p.z > ob.box.hi.z + box_eps)
        return false;
    if (!ob.contains_point(p)) return false;
    best.t = t;
    best.index = i;
    return true;
}

// Reference kernel: linear scan over all polygons in index order.
KernelResult intersect_scalar(const EnvironmentMap &env, const Vec3 &origin,
                              const Vec3 &dir, int exclude);

#ifdef MMRAY_WITH_AVX2
KernelResult intersect_avx2(const EnvironmentMap &env, const Vec3 &origin,
                            const Vec3 &dir, int exclude);
#endif

}  // namespace mmray::detail
