#pragma once

#include <string>
#include <vector>

#include "femtoprop/fitting.hpp"
#include "femtoprop/pdp.hpp"
#include "femtoprop/propagation.hpp"

namespace femtoprop {

/// One receiver location's local-area statistics.
struct LocationSummary {
    std::string location_id;
    double distance_m = 0.0;
    double free_space_pl_db = 0.0;
    double avg_pl_db = 0.0;
    double min_pl_db = 0.0;
    double max_pl_db = 0.0;
    double min_ds_ns = 0.0;
    double max_ds_ns = 0.0;
    double avg_ds_ns = 0.0;
};

struct CampaignDataset {
    FrequencyBand band;
    std::vector<LocationSummary> rows;
};

/// CSV header: location_id,distance_m,free_space_pl_db,avg_pl_db,min_pl_db,
/// max_pl_db,min_ds_ns,max_ds_ns,avg_ds_ns. Throws ParseError with the row
/// number, DataError on duplicate ids or min/avg/max order violations.
CampaignDataset load_campaign(const std::string& csv_text, const FrequencyBand& band,
                              const std::string& source = "<campaign>");

/// Full-precision emitter; load_campaign parses its output back unchanged.
std::string campaign_csv(const CampaignDataset& campaign);

/// Transmit power and antenna gains of the measurement rig.
struct LinkConstants {
    double p_t_dbm = 0.0;
    double g_t_dbi = 0.0;
    double g_r_dbi = 0.0;
};

/// Local-area summary of one location's profiles: per-profile path loss
/// gives min/max, the composite (linearly averaged) profile gives the
/// average, and per-profile RMS delay spread after dynamic-range clipping
/// gives the spread statistics.
LocationSummary summarize_location(const std::vector<PowerDelayProfile>& pdps,
                                   const CalibrationReference& cal, const LinkConstants& link,
                                   double distance_m, const FrequencyBand& band,
                                   double dynamic_range_db = 30.0,
                                   const std::string& location_id = "");

/// count points centered on `center` along `direction`, consecutive points
/// spacing_m apart. direction need not be normalized.
std::vector<Point> track_positions(Point center, Point direction, double spacing_m, int count);

/// Aligned text table of per-material losses (one decimal, dB), followed by
/// any estimator warnings. Empty string for an empty estimate.
std::string partition_table(const PartitionLossEstimate& partitions);

struct Report {
    std::string text;         // human-readable tables, integer-dB precision
    std::string rows_csv;     // full-precision rows, load_campaign-compatible
    std::string scatter_csv;  // distance_m,pl_db,model_pl_db,residual_db
};

/// Deterministic report: campaign table, fit parameters with the fitting
/// caveats, and the partition table when the estimate is nonempty.
Report generate_report(const CampaignDataset& campaign, const PathLossFit& fit,
                       const PartitionLossEstimate& partitions);

}  // namespace femtoprop
