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

#include <atomic>
#include <cmath>

#include "mmray/detail/intersect_impl.hpp"

namespace mmray {

namespace {

using Kernel = detail::KernelResult (*)(const EnvironmentMap &, const Vec3 &, const Vec3 &, int);

std::atomic<bool> g_force_scalar{false};

Kernel pick_kernel() {
#ifdef MMRAY_WITH_AVX2
    if (!g_force_scalar.load(std::memory_order_relaxed) && __builtin_cpu_supports("avx2"))
        return &detail::intersect_avx2;
#endif
    return &detail::intersect_scalar;
}

}  // namespace

void set_force_scalar(bool force) { g_force_scalar.store(force, std::memory_order_relaxed); }

const char *intersect_backend() {
#ifdef MMRAY_WITH_AVX2
    if (!g_force_scalar.load(std::memory_order_relaxed) && __builtin_cpu_supports("avx2"))
        return "avx2";
#endif
    return "scalar";
}

std::optional<Hit> intersect_ray(const Vec3 &origin, const Vec3 &direction,
                                 const EnvironmentMap &env, int exclude) {
    detail::KernelResult r = pick_kernel()(env, origin, direction, exclude);
    if (r.index < 0) return std::nullopt;
    const Obstruction &ob = env.obstructions[static_cast<size_t>(r.index)];
    double c = std::min(1.0, std::abs(direction.dot(ob.normal)));
    return Hit{origin + direction * r.t, r.index, r.t, std::acos(c)};
}

}  // namespace mmray
