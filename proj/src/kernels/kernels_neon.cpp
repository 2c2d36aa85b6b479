// NEON lane width 2 (AArch64 only). Same contract as the AVX2 unit:
// element-wise results and comparisons bit-identical to scalar, horizontal
// sums reassociated.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace femtoprop::kern {
namespace {

inline double reduce_add(float64x2_t v) { return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1); }

double sum_neon(const double* v, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(v + i));
    double s = reduce_add(acc);
    for (; i < n; ++i) s += v[i];
    return s;
}

BinMoments bin_moments_neon(const double* g, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    float64x2_t a2 = vdupq_n_f64(0.0);
    const double k_init[2] = {0.0, 1.0};
    float64x2_t k = vld1q_f64(k_init);
    const float64x2_t step = vdupq_n_f64(2.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t gv = vld1q_f64(g + i);
        const float64x2_t gk = vmulq_f64(gv, k);
        a0 = vaddq_f64(a0, gv);
        a1 = vaddq_f64(a1, gk);
        a2 = vaddq_f64(a2, vmulq_f64(gk, k));
        k = vaddq_f64(k, step);
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

double max_value_neon(const double* v, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    float64x2_t acc = vdupq_n_f64(m);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(v + i));
    if (i > 0) m = vmaxvq_f64(acc);
    for (; i < n; ++i) m = v[i] > m ? v[i] : m;
    return m;
}

void zero_below_neon(double* v, std::size_t n, double threshold) {
    const float64x2_t thr = vdupq_n_f64(threshold);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t x = vld1q_f64(v + i);
        const uint64x2_t below = vcltq_f64(x, thr);
        const uint64x2_t kept = vbicq_u64(vreinterpretq_u64_f64(x), below);
        vst1q_f64(v + i, vreinterpretq_f64_u64(kept));
    }
    for (; i < n; ++i) {
        if (v[i] < threshold) v[i] = 0.0;
    }
}

void accumulate_neon(double* acc, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(src + i)));
    for (; i < n; ++i) acc[i] += src[i];
}

void scale_neon(double* v, std::size_t n, double factor) {
    const float64x2_t f = vdupq_n_f64(factor);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(v + i, vmulq_f64(vld1q_f64(v + i), f));
    for (; i < n; ++i) v[i] *= factor;
}

bool crossing_scan_neon(const double* ax, const double* ay, const double* bx, const double* by,
                        const double* len, std::size_t n, const detail::RayContext& ray,
                        std::uint8_t* mask) {
    const float64x2_t rx = vdupq_n_f64(ray.rx);
    const float64x2_t ry = vdupq_n_f64(ray.ry);
    const float64x2_t px = vdupq_n_f64(ray.px);
    const float64x2_t py = vdupq_n_f64(ray.py);
    const float64x2_t eps_ray = vdupq_n_f64(geom::kCoordTolerance * ray.len);
    const float64x2_t coord_tol = vdupq_n_f64(geom::kCoordTolerance);
    const float64x2_t neg_tol_t = vdupq_n_f64(-ray.tol_t);
    const float64x2_t hi_t = vdupq_n_f64(1.0 + ray.tol_t);
    const float64x2_t one = vdupq_n_f64(1.0);

    bool any_exact = false;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vax = vld1q_f64(ax + i);
        const float64x2_t vay = vld1q_f64(ay + i);
        const float64x2_t vbx = vld1q_f64(bx + i);
        const float64x2_t vby = vld1q_f64(by + i);
        const float64x2_t vlen = vld1q_f64(len + i);

        const float64x2_t sx = vsubq_f64(vbx, vax);
        const float64x2_t sy = vsubq_f64(vby, vay);
        const float64x2_t denom = vsubq_f64(vmulq_f64(rx, sy), vmulq_f64(ry, sx));
        const float64x2_t eps_den = vmulq_f64(eps_ray, vlen);
        const uint64x2_t exact = vcleq_f64(vabsq_f64(denom), eps_den);

        const float64x2_t qpx = vsubq_f64(vax, px);
        const float64x2_t qpy = vsubq_f64(vay, py);
        const float64x2_t t =
            vdivq_f64(vsubq_f64(vmulq_f64(qpx, sy), vmulq_f64(qpy, sx)), denom);
        const float64x2_t u =
            vdivq_f64(vsubq_f64(vmulq_f64(qpx, ry), vmulq_f64(qpy, rx)), denom);
        const float64x2_t tol_u = vdivq_f64(coord_tol, vlen);
        const float64x2_t neg_tol_u = vnegq_f64(tol_u);

        uint64x2_t cross = vcgeq_f64(t, neg_tol_t);
        cross = vandq_u64(cross, vcleq_f64(t, hi_t));
        cross = vandq_u64(cross, vcgeq_f64(u, neg_tol_u));
        cross = vandq_u64(cross, vcltq_f64(u, vsubq_f64(one, tol_u)));

        for (int lane = 0; lane < 2; ++lane) {
            const std::uint64_t e = lane == 0 ? vgetq_lane_u64(exact, 0) : vgetq_lane_u64(exact, 1);
            const std::uint64_t c = lane == 0 ? vgetq_lane_u64(cross, 0) : vgetq_lane_u64(cross, 1);
            mask[i + std::size_t(lane)] =
                e ? detail::kScanExact : (c ? detail::kScanCross : detail::kScanMiss);
            any_exact |= e != 0;
        }
    }
    for (; i < n; ++i) {
        mask[i] = detail::scan_wall(ray, ax[i], ay[i], bx[i], by[i], len[i]);
        any_exact |= mask[i] == detail::kScanExact;
    }
    return any_exact;
}

}  // namespace

const Ops& neon_ops() {
    static const Ops ops = {
        "neon",          sum_neon,        bin_moments_neon, max_value_neon,
        zero_below_neon, accumulate_neon, scale_neon,       crossing_scan_neon,
    };
    return ops;
}

}  // namespace femtoprop::kern

#endif  // __aarch64__
