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

// AVX2 plane-distance kernel, 4 polygons per iteration. No FMA: the add/mul
// sequence mirrors the scalar kernel so both produce bitwise-identical t.

#include <immintrin.h>

#include <cmath>

#include "mmray/detail/intersect_impl.hpp"

namespace mmray::detail {

KernelResult intersect_avx2(const EnvironmentMap &env, const Vec3 &origin, const Vec3 &dir,
                            int exclude) {
    KernelResult best;
    const size_t n = env.obstructions.size();
    const __m256d ox = _mm256_set1_pd(origin.x);
    const __m256d oy = _mm256_set1_pd(origin.y);
    const __m256d oz = _mm256_set1_pd(origin.z);
    const __m256d dx = _mm256_set1_pd(dir.x);
    const __m256d dy = _mm256_set1_pd(dir.y);
    const __m256d dz = _mm256_set1_pd(dir.z);
    const __m256d eps = _mm256_set1_pd(1e-12);
    const __m256d sign_mask = _mm256_set1_pd(-0.0);

    size_t i = 0;
    alignas(32) double ts[4];
    for (; i + 4 <= n; i += 4) {
        __m256d nx = _mm256_loadu_pd(&env.plane_nx[i]);
        __m256d ny = _mm256_loadu_pd(&env.plane_ny[i]);
        __m256d nz = _mm256_loadu_pd(&env.plane_nz[i]);
        __m256d pd = _mm256_loadu_pd(&env.plane_d[i]);

        __m256d denom = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(dx, nx), _mm256_mul_pd(dy, ny)), _mm256_mul_pd(dz, nz));
        __m256d odot = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(ox, nx), _mm256_mul_pd(oy, ny)), _mm256_mul_pd(oz, nz));
        __m256d t = _mm256_div_pd(_mm256_sub_pd(pd, odot), denom);

        __m256d abs_denom = _mm256_andnot_pd(sign_mask, denom);
        __m256d ok = _mm256_cmp_pd(abs_denom, eps, _CMP_GE_OQ);
        int mask = _mm256_movemask_pd(ok);
        if (!mask) continue;
        _mm256_store_pd(ts, t);
        for (int lane = 0; lane < 4; ++lane) {
            if (!(mask & (1 << lane))) continue;
            int idx = static_cast<int>(i) + lane;
            if (idx == exclude) continue;
            accept_candidate(env, idx, origin, dir, ts[lane], best);
        }
    }
    for (; i < n; ++i) {
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
