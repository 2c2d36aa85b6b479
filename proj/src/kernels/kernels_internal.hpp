#pragma once

#include <cstddef>
#include <cstdint>

#include "../crossing_detail.hpp"
#include "femtoprop/kernels.hpp"

namespace femtoprop::kern {

// One backend's entry points. Raw-pointer signatures keep the per-ISA
// translation units free of anything but arithmetic.
struct Ops {
    const char* name;
    double (*sum)(const double*, std::size_t);
    BinMoments (*bin_moments)(const double*, std::size_t);
    double (*max_value)(const double*, std::size_t);
    void (*zero_below)(double*, std::size_t, double);
    void (*accumulate)(double*, const double*, std::size_t);
    void (*scale)(double*, std::size_t, double);
    bool (*crossing_scan)(const double* ax, const double* ay, const double* bx, const double* by,
                          const double* len, std::size_t n, const detail::RayContext& ray,
                          std::uint8_t* mask);
};

const Ops& scalar_ops();

#if defined(__x86_64__)
const Ops& avx2_ops();  // callable only when the CPU supports AVX2
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

/// Entry-point table for a backend, or nullptr when it is not compiled in or
/// the CPU lacks it. Used by dispatch and by the equivalence tests.
const Ops* ops_for(Backend b);

}  // namespace femtoprop::kern
