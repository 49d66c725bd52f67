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

#include <cmath>

#include "mmray/detail/intersect_impl.hpp"

namespace mmray::detail {

KernelResult intersect_scalar(const EnvironmentMap &env, const Vec3 &origin, const Vec3 &dir,
                              int exclude) {
    KernelResult best;
    const size_t n = env.obstructions.size();
    for (size_t i = 0; i < n; ++i) {
        if (static_cast<int>(i) == exclude) continue;
        double nx = env.plane_nx[i], ny = env.plane_ny[i], nz = env.plane_nz[i];
        double denom = dir.x * nx + dir.y * ny + dir.z * nz;
        if (std::abs(denom) < 1e-12) continue;
        double t = (env.plane_d[i] - (origin.x * nx + origin.y * ny + origin.z * nz)) / denom;
        accept_candidate(env, static_cast<int>(i), origin, dir, t, best);
    }
    return best;
}

}  // namespace mmray::detail
