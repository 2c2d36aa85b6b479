#include "femtoprop/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "femtoprop/error.hpp"
#include "femtoprop/util.hpp"
#include "textio.hpp"

namespace femtoprop {
namespace {

constexpr const char* kColumns[] = {"location_id", "distance_m", "free_space_pl_db",
                                    "avg_pl_db",   "min_pl_db",  "max_pl_db",
                                    "min_ds_ns",   "max_ds_ns",  "avg_ds_ns"};
constexpr std::size_t kColumnCount = 9;

template <typename... Args>
std::string sfmt(const char* spec, Args... args) {
    char buf[320];
    std::snprintf(buf, sizeof buf, spec, args...);
    return std::string(buf);
}

}  // namespace

CampaignDataset load_campaign(const std::string& csv_text, const FrequencyBand& band,
                              const std::string& source) {
    using textio::Field;
    CampaignDataset out;
    out.band = band;
    const std::vector<std::string_view> lines = textio::split_lines(csv_text);
    bool have_header = false;
    std::set<std::string> ids;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int ln = int(li) + 1;
        const std::string_view line = lines[li];
        if (line.empty() || line[0] == '#') continue;
        const std::vector<Field> f = textio::split_csv(line);
        if (!have_header) {
            if (f.size() != kColumnCount)
                throw ParseError(source, ln, 1,
                                 "campaign header needs " + std::to_string(kColumnCount) +
                                     " columns, got " + std::to_string(f.size()));
            for (std::size_t i = 0; i < kColumnCount; ++i) {
                if (f[i].text != kColumns[i])
                    throw ParseError(source, ln, f[i].column,
                                     std::string("expected header column '") + kColumns[i] +
                                         "', got '" + f[i].text + "'");
            }
            have_header = true;
            continue;
        }
        if (f.size() != kColumnCount)
            throw ParseError(source, ln, 1,
                             "expected " + std::to_string(kColumnCount) + " fields, got " +
                                 std::to_string(f.size()));
        LocationSummary row;
        row.location_id = f[0].text;
        if (row.location_id.empty()) throw ParseError(source, ln, f[0].column, "empty location id");
        row.distance_m = textio::parse_double(f[1], source, ln);
        row.free_space_pl_db = textio::parse_double(f[2], source, ln);
        row.avg_pl_db = textio::parse_double(f[3], source, ln);
        row.min_pl_db = textio::parse_double(f[4], source, ln);
        row.max_pl_db = textio::parse_double(f[5], source, ln);
        row.min_ds_ns = textio::parse_double(f[6], source, ln);
        row.max_ds_ns = textio::parse_double(f[7], source, ln);
        row.avg_ds_ns = textio::parse_double(f[8], source, ln);
        if (row.distance_m <= 0.0)
            throw ParseError(source, ln, f[1].column, "distance must be positive");
        if (!ids.insert(row.location_id).second)
            throw DataError("duplicate location id '" + row.location_id + "' (row " +
                            std::to_string(ln) + ")");
        if (!(row.min_pl_db <= row.avg_pl_db && row.avg_pl_db <= row.max_pl_db))
            throw DataError("location '" + row.location_id +
                            "': path loss min/avg/max out of order");
        if (!(row.min_ds_ns <= row.avg_ds_ns && row.avg_ds_ns <= row.max_ds_ns))
            throw DataError("location '" + row.location_id +
                            "': delay spread min/avg/max out of order");
        out.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError(source, 1, 1, "missing campaign header");
    return out;
}

std::string campaign_csv(const CampaignDataset& campaign) {
    std::string out;
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (i) out += ',';
        out += kColumns[i];
    }
    out += '\n';
    for (const LocationSummary& r : campaign.rows) {
        out += r.location_id;
        for (const double v : {r.distance_m, r.free_space_pl_db, r.avg_pl_db, r.min_pl_db,
                               r.max_pl_db, r.min_ds_ns, r.max_ds_ns, r.avg_ds_ns}) {
            out += ',';
            out += fmt_double(v);
        }
        out += '\n';
    }
    return out;
}

LocationSummary summarize_location(const std::vector<PowerDelayProfile>& pdps,
                                   const CalibrationReference& cal, const LinkConstants& link,
                                   double distance_m, const FrequencyBand& band,
                                   double dynamic_range_db, const std::string& location_id) {
    if (pdps.empty()) throw DataError("summarize_location: no profiles");
    LocationSummary out;
    out.location_id = location_id;
    out.distance_m = distance_m;
    out.free_space_pl_db = free_space_path_loss(band, distance_m);

    double min_pl = 0.0, max_pl = 0.0;
    double min_ds = 0.0, max_ds = 0.0, sum_ds = 0.0;
    for (std::size_t i = 0; i < pdps.size(); ++i) {
        const double p_rec = narrowband_power(pdps[i], cal);
        const double pl = path_loss_from_link(link.p_t_dbm, link.g_t_dbi, link.g_r_dbi, p_rec);
        const double ds = rms_delay_spread(clip_dynamic_range(pdps[i], dynamic_range_db));
        if (i == 0) {
            min_pl = max_pl = pl;
            min_ds = max_ds = ds;
        } else {
            min_pl = std::min(min_pl, pl);
            max_pl = std::max(max_pl, pl);
            min_ds = std::min(min_ds, ds);
            max_ds = std::max(max_ds, ds);
        }
        sum_ds += ds;
    }
    const double avg_rec = narrowband_power(average_local_area(pdps), cal);
    out.avg_pl_db = path_loss_from_link(link.p_t_dbm, link.g_t_dbi, link.g_r_dbi, avg_rec);
    out.min_pl_db = min_pl;
    out.max_pl_db = max_pl;
    out.min_ds_ns = min_ds;
    out.max_ds_ns = max_ds;
    out.avg_ds_ns = sum_ds / double(pdps.size());
    return out;
}

std::vector<Point> track_positions(Point center, Point direction, double spacing_m, int count) {
    if (count < 1) throw std::domain_error("track_positions: count must be >= 1");
    if (spacing_m < 0.0) throw std::domain_error("track_positions: spacing must be >= 0");
    std::vector<Point> out;
    out.reserve(std::size_t(count));
    if (count == 1 || spacing_m == 0.0) {
        out.assign(std::size_t(count), center);
        return out;
    }
    const double len = std::hypot(direction.x, direction.y);
    if (len == 0.0) throw std::domain_error("track_positions: zero direction");
    const double ux = direction.x / len;
    const double uy = direction.y / len;
    for (int i = 0; i < count; ++i) {
        const double offset = (double(i) - double(count - 1) / 2.0) * spacing_m;
        out.push_back({center.x + offset * ux, center.y + offset * uy});
    }
    return out;
}

std::string partition_table(const PartitionLossEstimate& partitions) {
    if (partitions.by_material.empty()) return "";
    std::string t = sfmt("%-14s %8s %7s %6s %10s\n", "material", "mean_db", "std_db", "links",
                         "db_per_cm");
    for (const auto& [id, est] : partitions.by_material) {
        const std::string norm =
            est.normalized_db_per_cm ? sfmt("%.1f", *est.normalized_db_per_cm) : std::string("-");
        t += sfmt("%-14s %8.1f %7.1f %6d %10s\n", id.c_str(), est.mean_loss_db, est.std_db,
                  est.sample_count, norm.c_str());
    }
    for (const std::string& w : partitions.warnings) t += "warning: " + w + "\n";
    return t;
}

Report generate_report(const CampaignDataset& campaign, const PathLossFit& fit,
                       const PartitionLossEstimate& partitions) {
    Report rep;
    std::string& t = rep.text;
    t += sfmt("campaign report: %s GHz, %zu locations\n\n",
              fmt_double(campaign.band.frequency_ghz).c_str(), campaign.rows.size());
    t += sfmt("%-9s %7s %8s %7s %7s %7s %10s %10s %10s\n", "location", "dist_m", "fspl_db",
              "avg_db", "min_db", "max_db", "min_ds_ns", "max_ds_ns", "avg_ds_ns");
    for (const LocationSummary& r : campaign.rows) {
        t += sfmt("%-9s %7.1f %8.0f %7.0f %7.0f %7.0f %10.0f %10.0f %10.0f\n",
                  r.location_id.c_str(), r.distance_m, r.free_space_pl_db, r.avg_pl_db,
                  r.min_pl_db, r.max_pl_db, r.min_ds_ns, r.max_ds_ns, r.avg_ds_ns);
    }

    t += "\npath loss fit (intercept pinned at the reference distance)\n";
    t += sfmt("  d0 = %s m, pl(d0) = %s dB\n", fmt_double(fit.d0).c_str(),
              fmt_double(fit.pl_d0).c_str());
    t += sfmt("  n = %.1f\n", fit.n);
    t += sfmt("  sigma = %.1f dB (rms residual about the zero-mean model)\n", fit.sigma);
    if (!campaign.rows.empty()) {
        double mean = 0.0;
        std::vector<double> res;
        res.reserve(campaign.rows.size());
        for (const LocationSummary& r : campaign.rows) {
            const double model = log_distance_path_loss(fit, r.distance_m);
            res.push_back(r.avg_pl_db - model);
            mean += res.back();
        }
        mean /= double(res.size());
        double ss = 0.0;
        for (const double v : res) ss += (v - mean) * (v - mean);
        t += sfmt("  sigma about the residual mean = %.1f dB\n",
                  std::sqrt(ss / double(res.size())));
    }
    t += "  note: n and sigma are fitted to local-area average path loss with the\n"
         "  intercept pinned to free space at the reference distance; fits over\n"
         "  per-position profiles or with a free intercept can differ materially.\n";

    const std::string ptable = partition_table(partitions);
    if (!ptable.empty()) {
        t += "\npartition losses\n";
        t += ptable;
    }

    rep.rows_csv = campaign_csv(campaign);

    rep.scatter_csv = "distance_m,pl_db,model_pl_db,residual_db\n";
    for (const LocationSummary& r : campaign.rows) {
        const double model = log_distance_path_loss(fit, r.distance_m);
        rep.scatter_csv += fmt_double(r.distance_m) + "," + fmt_double(r.avg_pl_db) + "," +
                           fmt_double(model) + "," + fmt_double(r.avg_pl_db - model) + "\n";
    }
    return rep;
}

}  // namespace femtoprop
