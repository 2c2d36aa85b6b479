#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "femtoprop/geometry.hpp"

// Shared ray-vs-wall predicate. The scalar form below is the reference; the
// SIMD kernels evaluate the identical expressions lane-wise, so every
// translation unit that includes this header is built with -ffp-contract=off
// to keep scalar and vector decisions bit-identical. Everything here is
// forced inline so no out-of-line comdat copy from the AVX2 unit can be
// linked into the portable code paths.
#define FEMTOPROP_FORCE_INLINE inline __attribute__((always_inline))

namespace femtoprop::detail {

struct RayContext {
    double px, py;   // origin (tx)
    double rx, ry;   // direction vector (rx - tx), not normalized
    double len;      // |r|
    double tol_t;    // kCoordTolerance / len, parameter tolerance on the ray
};

FEMTOPROP_FORCE_INLINE RayContext make_ray(Point tx, Point rx) {
    RayContext c;
    c.px = tx.x;
    c.py = tx.y;
    c.rx = rx.x - tx.x;
    c.ry = rx.y - tx.y;
    c.len = std::sqrt(c.rx * c.rx + c.ry * c.ry);
    c.tol_t = geom::kCoordTolerance / c.len;
    return c;
}

// Per-wall scan codes shared with the kernels.
inline constexpr std::uint8_t kScanMiss = 0;
inline constexpr std::uint8_t kScanCross = 1;
inline constexpr std::uint8_t kScanExact = 2;  // (near-)parallel, needs the full path

/// Fast-path decision for one wall, ray closed [0,1], wall half-open [a,b).
/// Returns kScanExact when the wall is within angular tolerance of the ray
/// and the transversal formulas cannot be trusted.
FEMTOPROP_FORCE_INLINE std::uint8_t scan_wall(const RayContext& ray, double ax, double ay, double bx, double by,
                              double wall_len) {
    const double sx = bx - ax;
    const double sy = by - ay;
    const double denom = ray.rx * sy - ray.ry * sx;
    const double eps_den = (geom::kCoordTolerance * ray.len) * wall_len;
    if (std::fabs(denom) <= eps_den) return kScanExact;

    const double qpx = ax - ray.px;
    const double qpy = ay - ray.py;
    const double t = (qpx * sy - qpy * sx) / denom;
    const double u = (qpx * ray.ry - qpy * ray.rx) / denom;
    const double tol_u = geom::kCoordTolerance / wall_len;

    const bool cross = (t >= -ray.tol_t) && (t <= 1.0 + ray.tol_t) && (u >= -tol_u) &&
                       (u < 1.0 - tol_u);
    return cross ? kScanCross : kScanMiss;
}

/// Ray parameter of the transversal crossing; only meaningful when
/// scan_wall returned kScanCross.
FEMTOPROP_FORCE_INLINE double crossing_param(const RayContext& ray, double ax, double ay, double bx, double by) {
    const double sx = bx - ax;
    const double sy = by - ay;
    const double denom = ray.rx * sy - ray.ry * sx;
    const double qpx = ax - ray.px;
    const double qpy = ay - ray.py;
    return (qpx * sy - qpy * sx) / denom;
}

struct CollinearOverlap {
    bool hit = false;
    double t0 = 0.0;  // overlap interval in ray parameters, t0 <= t1
    double t1 = 0.0;
};

/// Full classification of a wall flagged kScanExact: either a collinear
/// overlap run with the ray, or a parallel miss.
FEMTOPROP_FORCE_INLINE CollinearOverlap classify_exact(const RayContext& ray, double ax, double ay, double bx,
                                       double by) {
    CollinearOverlap out;
    // distance of both wall endpoints from the ray line
    const double qpx = ax - ray.px;
    const double qpy = ay - ray.py;
    const double unum_a = qpx * ray.ry - qpy * ray.rx;
    const double unum_b = (bx - ray.px) * ray.ry - (by - ray.py) * ray.rx;
    const double h = std::max(std::fabs(unum_a), std::fabs(unum_b)) / ray.len;
    if (h > geom::kCoordTolerance) return out;  // parallel but offset

    const double inv_rr = 1.0 / (ray.len * ray.len);
    const double ta = (qpx * ray.rx + qpy * ray.ry) * inv_rr;
    const double tb = ((bx - ray.px) * ray.rx + (by - ray.py) * ray.ry) * inv_rr;

    double lo = std::max(std::min(ta, tb), 0.0);
    double hi = std::min(std::max(ta, tb), 1.0);
    if (hi < lo - ray.tol_t) return out;  // no overlap with the ray extent

    if (hi - lo <= ray.tol_t) {
        // single-point touch; excluded if the touch is at the wall's open end
        const double touch = 0.5 * (lo + hi);
        if (std::fabs(touch - tb) <= ray.tol_t) return out;
    }
    out.hit = true;
    out.t0 = lo;
    out.t1 = std::max(lo, hi);
    return out;
}

}  // namespace femtoprop::detail
