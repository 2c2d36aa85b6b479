#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "femtoprop/geometry.hpp"
#include "femtoprop/sitemodel.hpp"

namespace femtoprop {

/// Propagation speed used for all wavelength math. The rounded radio value
/// keeps the canonical band pairs exact: 2.5 GHz -> 0.12 m, 60 GHz -> 0.005 m.
inline constexpr double kRadioSpeed = 3.0e8;  // m/s

struct FrequencyBand {
    double frequency_ghz = 0.0;
    double wavelength_m = 0.0;
};

/// Band at the given carrier. Throws std::domain_error for f <= 0.
FrequencyBand make_band(double frequency_ghz);

/// Log-distance model parameters: PL(d) = pl_d0 + 10 n log10(d/d0) + X_sigma.
struct PathLossFit {
    double d0 = 1.0;     // reference distance, m
    double pl_d0 = 0.0;  // path loss at d0, dB
    double n = 2.0;      // path loss exponent
    double sigma = 0.0;  // shadowing standard deviation, dB
};

/// 20*log10(4 pi d / lambda), dB. Throws std::domain_error for d <= 0.
double free_space_path_loss(const FrequencyBand& band, double d_m);

double log_distance_path_loss(const PathLossFit& fit, double d_m, double shadowing_db = 0.0);

/// Zero-mean Gaussian with standard deviation sigma_db, reproducible per
/// (seed, index); independent draws across the index stream.
double sample_shadowing(double sigma_db, std::uint64_t seed, std::uint64_t index);

struct BreakdownEntry {
    std::string material;
    int count = 0;              // wall crossings, or encroaching clutter objects
    double unit_loss_db = 0.0;  // per crossing / per object
    double subtotal_db = 0.0;   // count * unit_loss_db
    bool is_clutter = false;
};

struct PredictionBreakdown {
    double distance_m = 0.0;
    double free_space_pl_db = 0.0;
    std::vector<BreakdownEntry> entries;  // wall materials then clutter, each id-sorted
    double total_pl_db = 0.0;             // free_space + subtotals, summed in entry order
};

/// Free space plus per-partition excess along the direct ray, with clutter
/// charged once per object encroaching on the first Fresnel zone. Antenna
/// gains are not part of path loss. Throws std::domain_error on coincident
/// endpoints and DataError when a crossed material lacks the band.
PredictionBreakdown partition_path_loss(const SiteModel& site, Point tx, Point rx,
                                        const FrequencyBand& band);
PredictionBreakdown partition_path_loss(const SiteModel& site, const std::string& tx_node,
                                        const std::string& rx_node, const FrequencyBand& band);

/// p_t + g_t + g_r - pl, dBm. Inverse of path_loss_from_link.
double received_power_dbm(double p_t_dbm, double g_t_dbi, double g_r_dbi, double pl_db);

struct GridBounds {
    double x0 = 0.0, y0 = 0.0;
    double x1 = 0.0, y1 = 0.0;
};

struct CoverageGrid {
    GridBounds bounds;
    double resolution_m = 0.0;
    std::size_t nx = 0, ny = 0;
    std::vector<double> pl_db;  // row-major: ny rows of nx values, y increasing

    double cell_x(std::size_t i) const { return bounds.x0 + (double(i) + 0.5) * resolution_m; }
    double cell_y(std::size_t j) const { return bounds.y0 + (double(j) + 0.5) * resolution_m; }
    double at(std::size_t i, std::size_t j) const { return pl_db[j * nx + i]; }
};

/// partition_path_loss total at every cell center, evaluated through the
/// vector crossing scan. Cells closer to the transmitter than resolution/2
/// get the free-space term clamped to resolution/2 so the grid stays finite.
CoverageGrid coverage_grid(const SiteModel& site, const std::string& tx_node,
                           const FrequencyBand& band, GridBounds bounds, double resolution_m);

/// `x,y,path_loss_db` rows (6 decimals) under a header comment recording
/// transmitter, band, bounds, and resolution.
std::string coverage_csv(const CoverageGrid& grid, const std::string& tx_id,
                         const FrequencyBand& band);

/// Binary 8-bit PGM, top row = northmost cells; gray maps linearly from the
/// grid minimum (0) to maximum (255), both recorded in the comment line.
std::string coverage_pgm(const CoverageGrid& grid);

}  // namespace femtoprop
