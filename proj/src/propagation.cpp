#include "femtoprop/propagation.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "femtoprop/error.hpp"
#include "femtoprop/kernels.hpp"
#include "femtoprop/util.hpp"

namespace femtoprop {

FrequencyBand make_band(double frequency_ghz) {
    if (frequency_ghz <= 0.0) throw std::domain_error("frequency must be positive");
    return {frequency_ghz, kRadioSpeed / (frequency_ghz * 1e9)};
}

double free_space_path_loss(const FrequencyBand& band, double d_m) {
    if (d_m <= 0.0) throw std::domain_error("free-space path loss needs d > 0");
    if (band.wavelength_m <= 0.0) throw std::domain_error("wavelength must be positive");
    return 20.0 * std::log10(4.0 * std::numbers::pi * d_m / band.wavelength_m);
}

double log_distance_path_loss(const PathLossFit& fit, double d_m, double shadowing_db) {
    if (d_m <= 0.0) throw std::domain_error("log-distance path loss needs d > 0");
    if (fit.d0 <= 0.0) throw std::domain_error("reference distance must be positive");
    return fit.pl_d0 + 10.0 * fit.n * std::log10(d_m / fit.d0) + shadowing_db;
}

double sample_shadowing(double sigma_db, std::uint64_t seed, std::uint64_t index) {
    if (sigma_db < 0.0) throw std::domain_error("shadowing sigma must be nonnegative");
    if (sigma_db == 0.0) return 0.0;
    const std::uint64_t r1 = mix64(seed ^ mix64(2 * index));
    const std::uint64_t r2 = mix64(seed ^ mix64(2 * index + 1));
    const double u1 = (double(r1 >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = double(r2 >> 11) * 0x1.0p-53;          // [0, 1)
    return sigma_db * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double received_power_dbm(double p_t_dbm, double g_t_dbi, double g_r_dbi, double pl_db) {
    return p_t_dbm + g_t_dbi + g_r_dbi - pl_db;
}

namespace {

/// Shared by the single-link prediction and every coverage cell so both
/// produce identical totals for identical counts: entries in map order,
/// total accumulated in entry order.
PredictionBreakdown assemble_breakdown(const SiteModel& site, const FrequencyBand& band,
                                       double distance_m, double fspl_db,
                                       const std::map<std::string, int>& wall_counts,
                                       const std::map<std::string, int>& clutter_hits) {
    PredictionBreakdown out;
    out.distance_m = distance_m;
    out.free_space_pl_db = fspl_db;
    double total = fspl_db;
    for (const auto& [material, count] : wall_counts) {
        BreakdownEntry e;
        e.material = material;
        e.count = count;
        e.unit_loss_db = site.loss_at(material, band.frequency_ghz);
        e.subtotal_db = double(count) * e.unit_loss_db;
        e.is_clutter = false;
        total += e.subtotal_db;
        out.entries.push_back(std::move(e));
    }
    for (const auto& [material, count] : clutter_hits) {
        BreakdownEntry e;
        e.material = material;
        e.count = count;
        e.unit_loss_db = site.loss_at(material, band.frequency_ghz);
        e.subtotal_db = double(count) * e.unit_loss_db;
        e.is_clutter = true;
        total += e.subtotal_db;
        out.entries.push_back(std::move(e));
    }
    out.total_pl_db = total;
    return out;
}

}  // namespace

PredictionBreakdown partition_path_loss(const SiteModel& site, Point tx, Point rx,
                                        const FrequencyBand& band) {
    const double d = geom::distance(tx, rx);
    if (d <= geom::kCoordTolerance)
        throw std::domain_error("partition path loss needs distinct endpoints");
    const double fspl = free_space_path_loss(band, d);
    return assemble_breakdown(site, band, d, fspl, geom::crossing_counts(site, tx, rx),
                              geom::clutter_counts(site, tx, rx, band.wavelength_m));
}

PredictionBreakdown partition_path_loss(const SiteModel& site, const std::string& tx_node,
                                        const std::string& rx_node, const FrequencyBand& band) {
    const RadioNode* tx = site.find_node(tx_node);
    if (tx == nullptr) throw DataError("unknown node '" + tx_node + "'");
    const RadioNode* rx = site.find_node(rx_node);
    if (rx == nullptr) throw DataError("unknown node '" + rx_node + "'");
    return partition_path_loss(site, tx->position, rx->position, band);
}

CoverageGrid coverage_grid(const SiteModel& site, const std::string& tx_node,
                           const FrequencyBand& band, GridBounds bounds, double resolution_m) {
    if (resolution_m <= 0.0) throw std::domain_error("resolution must be positive");
    if (bounds.x1 <= bounds.x0 || bounds.y1 <= bounds.y0)
        throw std::domain_error("degenerate coverage bounds");
    const RadioNode* tx = site.find_node(tx_node);
    if (tx == nullptr) throw DataError("unknown node '" + tx_node + "'");
    const Point tp = tx->position;

    CoverageGrid grid;
    grid.bounds = bounds;
    grid.resolution_m = resolution_m;
    grid.nx = std::size_t(std::ceil((bounds.x1 - bounds.x0) / resolution_m - 1e-9));
    grid.ny = std::size_t(std::ceil((bounds.y1 - bounds.y0) / resolution_m - 1e-9));
    grid.nx = std::max<std::size_t>(grid.nx, 1);
    grid.ny = std::max<std::size_t>(grid.ny, 1);
    grid.pl_db.resize(grid.nx * grid.ny);

    kern::WallTable walls;
    std::vector<const std::string*> wall_material(site.walls.size());
    for (std::size_t i = 0; i < site.walls.size(); ++i) {
        walls.add(site.walls[i].geometry);
        wall_material[i] = &site.walls[i].material;
    }
    std::vector<std::uint8_t> mask(walls.size());
    const double near_field = 0.5 * resolution_m;

    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const Point cell{grid.cell_x(i), grid.cell_y(j)};
            const double d = geom::distance(tp, cell);

            std::map<std::string, int> wall_counts;
            std::map<std::string, int> clutter_hits;
            if (d > geom::kCoordTolerance) {
                if (kern::crossing_scan(walls, tp, cell, mask)) {
                    // a (near-)collinear wall needs the overlap-merging path
                    wall_counts = geom::crossing_counts(site, tp, cell);
                } else {
                    for (std::size_t w = 0; w < mask.size(); ++w) {
                        if (mask[w] == kern::kCross) ++wall_counts[*wall_material[w]];
                    }
                }
                clutter_hits = geom::clutter_counts(site, tp, cell, band.wavelength_m);
            }
            const double d_eff = std::max(d, near_field);
            const double fspl = free_space_path_loss(band, d_eff);
            grid.pl_db[j * grid.nx + i] =
                assemble_breakdown(site, band, d_eff, fspl, wall_counts, clutter_hits)
                    .total_pl_db;
        }
    }
    return grid;
}

std::string coverage_csv(const CoverageGrid& grid, const std::string& tx_id,
                         const FrequencyBand& band) {
    std::string out = "# tx=" + tx_id + " band_ghz=" + fmt_double(band.frequency_ghz) +
                      " bounds=" + fmt_double(grid.bounds.x0) + "," + fmt_double(grid.bounds.y0) +
                      "," + fmt_double(grid.bounds.x1) + "," + fmt_double(grid.bounds.y1) +
                      " resolution=" + fmt_double(grid.resolution_m) + "\n";
    out += "x,y,path_loss_db\n";
    char row[128];
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            std::snprintf(row, sizeof(row), "%.6f,%.6f,%.6f\n", grid.cell_x(i), grid.cell_y(j),
                          grid.at(i, j));
            out += row;
        }
    }
    return out;
}

std::string coverage_pgm(const CoverageGrid& grid) {
    double lo = grid.pl_db.empty() ? 0.0 : grid.pl_db[0];
    double hi = lo;
    for (const double v : grid.pl_db) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::string out = "P5\n# pl_db min=" + fmt_double(lo) + " max=" + fmt_double(hi) + "\n" +
                      std::to_string(grid.nx) + " " + std::to_string(grid.ny) + "\n255\n";
    const double span = hi - lo;
    // top row = largest y so the image reads like the floor plan
    for (std::size_t jj = grid.ny; jj-- > 0;) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const double v = grid.at(i, jj);
            const int gray = span > 0.0 ? int(std::lround((v - lo) / span * 255.0)) : 0;
            out.push_back(char(std::clamp(gray, 0, 255)));
        }
    }
    return out;
}

}  // namespace femtoprop
