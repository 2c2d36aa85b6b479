// AVX2 lane width 4. Element-wise ops and all comparisons reproduce the
// scalar reference bit for bit (same expressions, no FMA); horizontal sums
// reassociate and are only accuracy-tested.

#if defined(__x86_64__)

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace femtoprop::kern {
namespace {

inline double reduce_add(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

inline double reduce_max(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    double m = lane[0];
    m = lane[1] > m ? lane[1] : m;
    m = lane[2] > m ? lane[2] : m;
    m = lane[3] > m ? lane[3] : m;
    return m;
}

double sum_avx2(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
    double s = reduce_add(acc);
    for (; i < n; ++i) s += v[i];
    return s;
}

BinMoments bin_moments_avx2(const double* g, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d k = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d step = _mm256_set1_pd(4.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gv = _mm256_loadu_pd(g + i);
        const __m256d gk = _mm256_mul_pd(gv, k);
        a0 = _mm256_add_pd(a0, gv);
        a1 = _mm256_add_pd(a1, gk);
        a2 = _mm256_add_pd(a2, _mm256_mul_pd(gk, k));
        k = _mm256_add_pd(k, step);
    }
    BinMoments m;
    m.m0 = reduce_add(a0);
    m.m1 = reduce_add(a1);
    m.m2 = reduce_add(a2);
    for (; i < n; ++i) {
        const double kk = double(i);
        const double gk = g[i] * kk;
        m.m0 += g[i];
        m.m1 += gk;
        m.m2 += gk * kk;
    }
    return m;
}

double max_value_avx2(const double* v, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    __m256d acc = _mm256_set1_pd(m);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(v + i));
    if (i > 0) m = reduce_max(acc);
    for (; i < n; ++i) m = v[i] > m ? v[i] : m;
    return m;
}

void zero_below_avx2(double* v, std::size_t n, double threshold) {
    const __m256d thr = _mm256_set1_pd(threshold);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(v + i);
        const __m256d below = _mm256_cmp_pd(x, thr, _CMP_LT_OQ);
        _mm256_storeu_pd(v + i, _mm256_andnot_pd(below, x));
    }
    for (; i < n; ++i) {
        if (v[i] < threshold) v[i] = 0.0;
    }
}

void accumulate_avx2(double* acc, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(src + i)));
    }
    for (; i < n; ++i) acc[i] += src[i];
}

void scale_avx2(double* v, std::size_t n, double factor) {
    const __m256d f = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(v + i, _mm256_mul_pd(_mm256_loadu_pd(v + i), f));
    for (; i < n; ++i) v[i] *= factor;
}

bool crossing_scan_avx2(const double* ax, const double* ay, const double* bx, const double* by,
                        const double* len, std::size_t n, const detail::RayContext& ray,
                        std::uint8_t* mask) {
    const __m256d rx = _mm256_set1_pd(ray.rx);
    const __m256d ry = _mm256_set1_pd(ray.ry);
    const __m256d px = _mm256_set1_pd(ray.px);
    const __m256d py = _mm256_set1_pd(ray.py);
    const __m256d eps_ray = _mm256_set1_pd(geom::kCoordTolerance * ray.len);
    const __m256d coord_tol = _mm256_set1_pd(geom::kCoordTolerance);
    const __m256d tol_t = _mm256_set1_pd(ray.tol_t);
    const __m256d neg_tol_t = _mm256_set1_pd(-ray.tol_t);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d hi_t = _mm256_add_pd(one, tol_t);
    const __m256d sign_bit = _mm256_set1_pd(-0.0);

    bool any_exact = false;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vax = _mm256_loadu_pd(ax + i);
        const __m256d vay = _mm256_loadu_pd(ay + i);
        const __m256d vbx = _mm256_loadu_pd(bx + i);
        const __m256d vby = _mm256_loadu_pd(by + i);
        const __m256d vlen = _mm256_loadu_pd(len + i);

        const __m256d sx = _mm256_sub_pd(vbx, vax);
        const __m256d sy = _mm256_sub_pd(vby, vay);
        const __m256d denom = _mm256_sub_pd(_mm256_mul_pd(rx, sy), _mm256_mul_pd(ry, sx));
        const __m256d eps_den = _mm256_mul_pd(eps_ray, vlen);
        const __m256d abs_den = _mm256_andnot_pd(sign_bit, denom);
        const __m256d exact = _mm256_cmp_pd(abs_den, eps_den, _CMP_LE_OQ);

        const __m256d qpx = _mm256_sub_pd(vax, px);
        const __m256d qpy = _mm256_sub_pd(vay, py);
        const __m256d t = _mm256_div_pd(
            _mm256_sub_pd(_mm256_mul_pd(qpx, sy), _mm256_mul_pd(qpy, sx)), denom);
        const __m256d u = _mm256_div_pd(
            _mm256_sub_pd(_mm256_mul_pd(qpx, ry), _mm256_mul_pd(qpy, rx)), denom);
        const __m256d tol_u = _mm256_div_pd(coord_tol, vlen);
        const __m256d neg_tol_u = _mm256_xor_pd(tol_u, sign_bit);

        __m256d cross = _mm256_cmp_pd(t, neg_tol_t, _CMP_GE_OQ);
        cross = _mm256_and_pd(cross, _mm256_cmp_pd(t, hi_t, _CMP_LE_OQ));
        cross = _mm256_and_pd(cross, _mm256_cmp_pd(u, neg_tol_u, _CMP_GE_OQ));
        cross = _mm256_and_pd(cross, _mm256_cmp_pd(u, _mm256_sub_pd(one, tol_u), _CMP_LT_OQ));

        const int em = _mm256_movemask_pd(exact);
        const int cm = _mm256_movemask_pd(cross);
        for (int lane = 0; lane < 4; ++lane) {
            const int bit = 1 << lane;
            mask[i + std::size_t(lane)] =
                (em & bit) ? detail::kScanExact : ((cm & bit) ? detail::kScanCross : detail::kScanMiss);
        }
        any_exact |= em != 0;
    }
    for (; i < n; ++i) {
        mask[i] = detail::scan_wall(ray, ax[i], ay[i], bx[i], by[i], len[i]);
        any_exact |= mask[i] == detail::kScanExact;
    }
    return any_exact;
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops = {
        "avx2",          sum_avx2,        bin_moments_avx2, max_value_avx2,
        zero_below_avx2, accumulate_avx2, scale_avx2,       crossing_scan_avx2,
    };
    return ops;
}

}  // namespace femtoprop::kern

#endif  // __x86_64__
