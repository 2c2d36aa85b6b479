#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "femtoprop/propagation.hpp"
#include "femtoprop/sitemodel.hpp"

namespace femtoprop {

/// One measured link: distance, band, path loss, and how many partitions of
/// each material the direct ray crossed.
struct LinkObservation {
    std::string link_id;
    double distance_m = 0.0;
    FrequencyBand band;
    double measured_pl_db = 0.0;
    std::map<std::string, int> counts;
};

struct MaterialEstimate {
    double mean_loss_db = 0.0;
    double std_db = 0.0;  // population std of per-link attributed losses
    int sample_count = 0;
    std::optional<double> normalized_db_per_cm;
};

struct PartitionLossEstimate {
    std::map<std::string, MaterialEstimate> by_material;
    std::vector<std::string> warnings;
};

using DistancePl = std::pair<double, double>;  // (distance_m, pl_db)

/// Slope-only MMSE fit with the intercept pinned to (d0, pl_d0):
/// n = sum(x*y) / sum(x*x), x = 10 log10(d/d0), y = pl - pl_d0.
/// Throws DataError on an empty set or when every distance equals d0.
double fit_exponent(std::span<const DistancePl> points, double d0, double pl_d0);

/// Population RMS of the dB residuals about zero (the shadowing term is
/// zero-mean by definition; the mean-centered alternative is reported, not
/// returned).
double estimate_sigma(std::span<const DistancePl> points, double d0, double pl_d0, double n);

/// Per-material average of single-pass attributed excess loss: each link's
/// excess over free space is divided by that link's crossing count of the
/// material, with no charge to other materials (zero-initialized, one pass).
/// All links must share one band. Throws DataError on empty input or mixed
/// bands.
PartitionLossEstimate fit_partitions_composite(const std::vector<LinkObservation>& links);

/// Joint nonnegative least squares over all links: X minimizing
/// ||A X - excess||^2, X >= 0, with per-material std from the same
/// residual attribution as the composite method. Proportional count columns
/// produce a warning naming both materials. Same preconditions as above.
PartitionLossEstimate fit_partitions_nnls(const std::vector<LinkObservation>& links);

/// Fill normalized_db_per_cm = mean / thickness for materials that declare a
/// thickness; thickness-free materials stay unnormalized.
PartitionLossEstimate normalize_loss(PartitionLossEstimate estimate,
                                     const std::vector<Material>& materials);

/// min ||a x - b||^2 subject to x >= 0; a is row-major, rows x cols.
/// Active-set iteration, deterministic, KKT satisfied to 1e-8.
std::vector<double> nnls_solve(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                               const std::vector<double>& b);

/// CSV: header `link_id,distance_m,freq_ghz,measured_pl_db,<material>...`
/// with one crossing-count column per material.
std::vector<LinkObservation> parse_links_csv(const std::string& text,
                                             const std::string& source = "<links>");
std::string links_csv(const std::vector<LinkObservation>& links);

/// CSV: header `location_id,distance_m,pl_db`; the id column is ignored.
std::vector<DistancePl> parse_points_csv(const std::string& text,
                                         const std::string& source = "<points>");

}  // namespace femtoprop
