#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "femtoprop/geometry.hpp"

namespace femtoprop::kern {

enum class Backend : std::uint8_t { scalar, avx2, neon };

/// Backend picked at first use: FEMTOPROP_KERNELS=scalar|avx2|neon overrides,
/// otherwise the best instruction set the CPU reports.
Backend active_backend();
const char* backend_name(Backend b);
bool backend_available(Backend b);

struct BinMoments {
    double m0 = 0.0;  // sum g
    double m1 = 0.0;  // sum g*k
    double m2 = 0.0;  // sum g*k^2
};

double sum(std::span<const double> v);
BinMoments bin_moments(std::span<const double> gains);
double max_value(std::span<const double> v);  // -inf on empty
void zero_below(std::span<double> v, double threshold);
void accumulate(std::span<double> acc, std::span<const double> src);
void scale(std::span<double> v, double factor);

/// Wall segments in structure-of-arrays form for the crossing scan.
/// Segments must have nonzero length.
class WallTable {
  public:
    void add(const Segment& s);
    std::size_t size() const { return ax_.size(); }
    bool empty() const { return ax_.empty(); }

    const double* ax() const { return ax_.data(); }
    const double* ay() const { return ay_.data(); }
    const double* bx() const { return bx_.data(); }
    const double* by() const { return by_.data(); }
    const double* len() const { return len_.data(); }

  private:
    std::vector<double> ax_, ay_, bx_, by_, len_;
};

// Per-wall result codes written by crossing_scan.
inline constexpr std::uint8_t kMiss = 0;
inline constexpr std::uint8_t kCross = 1;
inline constexpr std::uint8_t kNeedsExact = 2;

/// Classify every wall against the tx-rx segment (ray closed, walls
/// half-open). mask must hold at least walls.size() bytes. Returns true if
/// any wall came back kNeedsExact, in which case the caller must resolve the
/// ray through the full collinear-aware path.
bool crossing_scan(const WallTable& walls, Point tx, Point rx, std::span<std::uint8_t> mask);

}  // namespace femtoprop::kern
