// Reference implementations. Every SIMD backend must reproduce these
// decisions exactly and these sums to reassociation accuracy.

#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace femtoprop::kern {
namespace {

double sum_scalar(const double* v, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
}

BinMoments bin_moments_scalar(const double* g, std::size_t n) {
    BinMoments m;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = double(i);
        const double gk = g[i] * k;
        m.m0 += g[i];
        m.m1 += gk;
        m.m2 += gk * k;
    }
    return m;
}

double max_value_scalar(const double* v, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = v[i] > m ? v[i] : m;
    return m;
}

void zero_below_scalar(double* v, std::size_t n, double threshold) {
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] < threshold) v[i] = 0.0;
    }
}

void accumulate_scalar(double* acc, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += src[i];
}

void scale_scalar(double* v, std::size_t n, double factor) {
    for (std::size_t i = 0; i < n; ++i) v[i] *= factor;
}

bool crossing_scan_scalar(const double* ax, const double* ay, const double* bx, const double* by,
                          const double* len, std::size_t n, const detail::RayContext& ray,
                          std::uint8_t* mask) {
    bool any_exact = false;
    for (std::size_t i = 0; i < n; ++i) {
        mask[i] = detail::scan_wall(ray, ax[i], ay[i], bx[i], by[i], len[i]);
        any_exact |= mask[i] == detail::kScanExact;
    }
    return any_exact;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        "scalar",        sum_scalar,        bin_moments_scalar, max_value_scalar,
        zero_below_scalar, accumulate_scalar, scale_scalar,     crossing_scan_scalar,
    };
    return ops;
}

}  // namespace femtoprop::kern
