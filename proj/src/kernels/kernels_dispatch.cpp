#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "femtoprop/kernels.hpp"
#include "kernels_internal.hpp"

namespace femtoprop::kern {

const Ops* ops_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &scalar_ops();
        case Backend::avx2:
#if defined(__x86_64__)
            if (__builtin_cpu_supports("avx2")) return &avx2_ops();
#endif
            return nullptr;
        case Backend::neon:
#if defined(__aarch64__)
            return &neon_ops();
#else
            return nullptr;
#endif
    }
    return nullptr;
}

namespace {

const Ops& resolve() {
    if (const char* env = std::getenv("FEMTOPROP_KERNELS")) {
        const std::string name(env);
        if (!name.empty()) {
            Backend want;
            if (name == "scalar") {
                want = Backend::scalar;
            } else if (name == "avx2") {
                want = Backend::avx2;
            } else if (name == "neon") {
                want = Backend::neon;
            } else {
                throw std::runtime_error("FEMTOPROP_KERNELS: unknown backend '" + name + "'");
            }
            const Ops* ops = ops_for(want);
            if (ops == nullptr) {
                throw std::runtime_error("FEMTOPROP_KERNELS: backend '" + name +
                                         "' is not available on this machine");
            }
            return *ops;
        }
    }
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2")) return avx2_ops();
#elif defined(__aarch64__)
    return neon_ops();
#endif
    return scalar_ops();
}

const Ops& active() {
    static const Ops& ops = resolve();
    return ops;
}

}  // namespace

Backend active_backend() {
    const std::string_view n = active().name;
    if (n == "avx2") return Backend::avx2;
    if (n == "neon") return Backend::neon;
    return Backend::scalar;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
        case Backend::scalar:
            break;
    }
    return "scalar";
}

bool backend_available(Backend b) { return ops_for(b) != nullptr; }

double sum(std::span<const double> v) { return active().sum(v.data(), v.size()); }

BinMoments bin_moments(std::span<const double> gains) {
    return active().bin_moments(gains.data(), gains.size());
}

double max_value(std::span<const double> v) { return active().max_value(v.data(), v.size()); }

void zero_below(std::span<double> v, double threshold) {
    active().zero_below(v.data(), v.size(), threshold);
}

void accumulate(std::span<double> acc, std::span<const double> src) {
    if (acc.size() != src.size()) throw std::invalid_argument("accumulate: size mismatch");
    active().accumulate(acc.data(), src.data(), acc.size());
}

void scale(std::span<double> v, double factor) { active().scale(v.data(), v.size(), factor); }

void WallTable::add(const Segment& s) {
    ax_.push_back(s.a.x);
    ay_.push_back(s.a.y);
    bx_.push_back(s.b.x);
    by_.push_back(s.b.y);
    len_.push_back(geom::distance(s.a, s.b));
}

bool crossing_scan(const WallTable& walls, Point tx, Point rx, std::span<std::uint8_t> mask) {
    if (mask.size() < walls.size()) throw std::invalid_argument("crossing_scan: mask too small");
    const detail::RayContext ray = detail::make_ray(tx, rx);
    return active().crossing_scan(walls.ax(), walls.ay(), walls.bx(), walls.by(), walls.len(),
                                  walls.size(), ray, mask.data());
}

}  // namespace femtoprop::kern
