#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "femtoprop/campaign.hpp"
#include "femtoprop/error.hpp"
#include "femtoprop/fitting.hpp"
#include "femtoprop/pdp.hpp"
#include "femtoprop/propagation.hpp"
#include "femtoprop/sitemodel.hpp"
#include "femtoprop/util.hpp"

namespace fp = femtoprop;

namespace {

struct Style {
    const char* bold;
    const char* reset;
};

Style pick_style() {
    const bool tty = ::isatty(STDOUT_FILENO) != 0;
    const bool no_color = std::getenv("FEMTOPROP_NO_COLOR") != nullptr;
    if (tty && !no_color) return {"\033[1m", "\033[0m"};
    return {"", ""};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fp::DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fp::DataError("cannot write '" + path + "'");
    out << text;
}

// stdout when no path was given
void emit(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        write_file(path, text);
}

double parse_num(std::string s, const char* what) {
    const std::size_t a = s.find_first_not_of(" \t");
    const std::size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) throw fp::DataError(std::string("invalid ") + what + " ''");
    s = s.substr(a, b - a + 1);
    double v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw fp::DataError(std::string("invalid ") + what + " '" + s + "'");
    return v;
}

// "(x,y)" is a literal coordinate, anything else a node id
std::optional<fp::Point> try_parse_point(const std::string& s) {
    if (s.empty() || s.front() != '(') return std::nullopt;
    if (s.back() != ')') throw fp::DataError("malformed point '" + s + "'");
    const std::string body = s.substr(1, s.size() - 2);
    const std::size_t comma = body.find(',');
    if (comma == std::string::npos) throw fp::DataError("malformed point '" + s + "'");
    return fp::Point{parse_num(body.substr(0, comma), "x coordinate"),
                     parse_num(body.substr(comma + 1), "y coordinate")};
}

fp::Point resolve_endpoint(const fp::SiteModel& site, const std::string& spec) {
    if (const std::optional<fp::Point> p = try_parse_point(spec)) return *p;
    const fp::RadioNode* node = site.find_node(spec);
    if (!node) throw fp::DataError("unknown node '" + spec + "'");
    return node->position;
}

fp::SiteModel load_validated_site(const std::string& path) {
    fp::SiteModel site = fp::load_site(path);
    const std::vector<std::string> problems = fp::validate_site(site);
    if (!problems.empty()) {
        std::string msg = "invalid site '" + path + "': " + problems[0];
        for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
        throw fp::DataError(msg);
    }
    return site;
}

void require_band_declared(const fp::SiteModel& site, double band_ghz) {
    if (site.materials.empty()) return;
    for (const fp::Material& m : site.materials) {
        if (fp::band_loss(m, band_ghz)) return;
    }
    throw fp::DataError("no material declares a loss near " + fp::fmt_double(band_ghz) + " GHz");
}

template <typename... Args>
std::string sfmt(const char* spec, Args... args) {
    char buf[320];
    std::snprintf(buf, sizeof buf, spec, args...);
    return std::string(buf);
}

struct PredictArgs {
    std::string site, tx, rx, csv_path;
    double band = 0.0;
};

void run_predict(const PredictArgs& a) {
    const fp::SiteModel site = load_validated_site(a.site);
    require_band_declared(site, a.band);
    const fp::FrequencyBand band = fp::make_band(a.band);
    const fp::Point tx = resolve_endpoint(site, a.tx);
    const fp::Point rx = resolve_endpoint(site, a.rx);
    const fp::PredictionBreakdown b = fp::partition_path_loss(site, tx, rx, band);
    const Style st = pick_style();

    std::string out;
    out += sfmt("%spath %s -> %s, %s GHz%s\n", st.bold, a.tx.c_str(), a.rx.c_str(),
                fp::fmt_double(a.band).c_str(), st.reset);
    out += sfmt("distance %.3f m\n", b.distance_m);
    out += sfmt("  %-14s%17s%8.2f dB\n", "free space", "", b.free_space_pl_db);
    bool any_clutter = false;
    for (const fp::BreakdownEntry& e : b.entries) {
        any_clutter = any_clutter || e.is_clutter;
        out += sfmt("  %-14s%3d x %6.2f dB  %8.2f dB%s\n", e.material.c_str(), e.count,
                    e.unit_loss_db, e.subtotal_db, e.is_clutter ? "  *" : "");
    }
    out += sfmt("%stotal %.2f dB%s\n", st.bold, b.total_pl_db, st.reset);
    if (any_clutter) out += "* fresnel-zone clutter, charged per object\n";
    std::cout << out;

    if (!a.csv_path.empty()) {
        std::string csv = "kind,material,count,unit_loss_db,subtotal_db\n";
        csv += "free_space,,,," + fp::fmt_double(b.free_space_pl_db) + "\n";
        for (const fp::BreakdownEntry& e : b.entries) {
            csv += std::string(e.is_clutter ? "clutter" : "wall") + "," + e.material + "," +
                   std::to_string(e.count) + "," + fp::fmt_double(e.unit_loss_db) + "," +
                   fp::fmt_double(e.subtotal_db) + "\n";
        }
        csv += "total,,,," + fp::fmt_double(b.total_pl_db) + "\n";
        write_file(a.csv_path, csv);
    }
}

struct CoverageArgs {
    std::string site, tx, out_csv, out_pgm;
    double band = 0.0, resolution = 0.0;
    std::vector<double> bounds;
};

void run_coverage(const CoverageArgs& a) {
    const fp::SiteModel site = load_validated_site(a.site);
    require_band_declared(site, a.band);
    const fp::FrequencyBand band = fp::make_band(a.band);
    const fp::GridBounds gb{a.bounds[0], a.bounds[1], a.bounds[2], a.bounds[3]};
    const fp::CoverageGrid grid = fp::coverage_grid(site, a.tx, band, gb, a.resolution);
    if (a.out_pgm.empty() || !a.out_csv.empty())
        emit(a.out_csv, fp::coverage_csv(grid, a.tx, band));
    if (!a.out_pgm.empty()) write_file(a.out_pgm, fp::coverage_pgm(grid));
}

struct FitExponentArgs {
    std::string points;
    double d0 = 1.0;
    std::optional<double> pl_d0;
    std::optional<double> band;
};

void run_fit_exponent(const FitExponentArgs& a) {
    if (!a.pl_d0 && !a.band) throw CLI::RequiredError("--pl-d0 or --band");
    const double p0 =
        a.pl_d0 ? *a.pl_d0 : fp::free_space_path_loss(fp::make_band(*a.band), a.d0);
    const std::vector<fp::DistancePl> points =
        fp::parse_points_csv(read_file(a.points), a.points);
    const double n = fp::fit_exponent(points, a.d0, p0);
    const double sigma = fp::estimate_sigma(points, a.d0, p0, n);
    std::cout << sfmt("n=%.2f sigma=%.2f\n", n, sigma);
}

struct FitPartitionsArgs {
    std::string links, site, csv_path;
    std::string method = "composite";
};

void run_fit_partitions(const FitPartitionsArgs& a) {
    const std::vector<fp::LinkObservation> links =
        fp::parse_links_csv(read_file(a.links), a.links);
    fp::PartitionLossEstimate est = a.method == "nnls" ? fp::fit_partitions_nnls(links)
                                                       : fp::fit_partitions_composite(links);
    if (!a.site.empty()) est = fp::normalize_loss(std::move(est), load_validated_site(a.site).materials);
    const std::string table = fp::partition_table(est);
    std::cout << (table.empty() ? std::string("(no materials)\n") : table);

    if (!a.csv_path.empty()) {
        std::string csv = "material,mean_loss_db,std_db,sample_count,normalized_db_per_cm\n";
        for (const auto& [id, m] : est.by_material) {
            csv += id + "," + fp::fmt_double(m.mean_loss_db) + "," + fp::fmt_double(m.std_db) +
                   "," + std::to_string(m.sample_count) + "," +
                   (m.normalized_db_per_cm ? fp::fmt_double(*m.normalized_db_per_cm)
                                           : std::string()) +
                   "\n";
        }
        write_file(a.csv_path, csv);
    }
}

struct PdpStatsArgs {
    std::vector<std::string> pdps;
    std::string cal, location;
    double distance = 0.0, band = 0.0;
    double p_t = 0.0, g_t = 0.0, g_r = 0.0, range = 30.0;
};

void run_pdp_stats(const PdpStatsArgs& a) {
    std::vector<fp::PdpFile> files;
    files.reserve(a.pdps.size());
    for (const std::string& path : a.pdps) files.push_back(fp::load_pdp(path));

    std::optional<fp::CalibrationReference> cal;
    if (!a.cal.empty()) {
        cal = fp::calibration_from(fp::load_pdp(a.cal));
    } else {
        for (const fp::PdpFile& f : files) {
            if (f.p_cal_dbm) {
                cal = fp::calibration_from(f);
                break;
            }
        }
    }
    if (!cal)
        throw fp::DataError("no calibration reference; pass --cal or embed p_cal_dbm");

    std::string location = a.location;
    std::vector<fp::PowerDelayProfile> profiles;
    profiles.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        profiles.push_back(files[i].pdp);
        if (location.empty()) location = files[i].pdp.location;
        const double p_rec = fp::narrowband_power(files[i].pdp, *cal);
        if (const std::optional<std::string> w = fp::plausibility_warning(p_rec))
            std::cerr << "warning: " << a.pdps[i] << ": " << *w << "\n";
    }

    const fp::LocationSummary s =
        fp::summarize_location(profiles, *cal, {a.p_t, a.g_t, a.g_r}, a.distance,
                               fp::make_band(a.band), a.range, location);
    std::string out;
    out += sfmt("location %s: %zu profiles\n", s.location_id.empty() ? "-" : s.location_id.c_str(),
                profiles.size());
    out += sfmt("distance %.3f m, free space %.2f dB\n", s.distance_m, s.free_space_pl_db);
    out += sfmt("path loss avg %.2f dB (min %.2f, max %.2f)\n", s.avg_pl_db, s.min_pl_db,
                s.max_pl_db);
    out += sfmt("delay spread avg %.2f ns (min %.2f, max %.2f)\n", s.avg_ds_ns, s.min_ds_ns,
                s.max_ds_ns);
    std::cout << out;
}

struct SimulatePdpArgs {
    std::vector<std::string> taps;
    std::string out, location;
    double delta = 2.5, noise = 0.0;
    std::optional<double> p_cal;
    std::optional<double> cal_integral;
};

void run_simulate_pdp(const SimulatePdpArgs& a) {
    std::vector<fp::Tap> taps;
    taps.reserve(a.taps.size());
    for (const std::string& spec : a.taps) {
        const std::size_t colon = spec.find(':');
        if (colon == std::string::npos)
            throw fp::DataError("tap spec must be delay_ns:power_mw, got '" + spec + "'");
        taps.push_back({parse_num(spec.substr(0, colon), "tap delay"),
                        parse_num(spec.substr(colon + 1), "tap power")});
    }
    fp::PowerDelayProfile pdp = fp::synthesize_pdp(taps, a.delta, a.noise);
    pdp.location = a.location;
    if (a.p_cal) {
        const fp::CalibrationReference cal{
            *a.p_cal, a.cal_integral ? *a.cal_integral : fp::integrate_pdp(pdp)};
        emit(a.out, fp::serialize_pdp(pdp, &cal));
    } else {
        emit(a.out, fp::serialize_pdp(pdp));
    }
}

struct ReportArgs {
    std::string campaign, links, site;
    std::string method = "composite";
    double band = 0.0, d0 = 1.0;
    std::optional<double> pl_d0;
    std::string out_text, out_rows, out_scatter;
};

void run_report(const ReportArgs& a) {
    const fp::FrequencyBand band = fp::make_band(a.band);
    const fp::CampaignDataset ds = fp::load_campaign(read_file(a.campaign), band, a.campaign);
    const double p0 = a.pl_d0 ? *a.pl_d0 : fp::free_space_path_loss(band, a.d0);

    std::vector<fp::DistancePl> points;
    points.reserve(ds.rows.size());
    for (const fp::LocationSummary& r : ds.rows) points.emplace_back(r.distance_m, r.avg_pl_db);
    fp::PathLossFit fit;
    fit.d0 = a.d0;
    fit.pl_d0 = p0;
    fit.n = fp::fit_exponent(points, a.d0, p0);
    fit.sigma = fp::estimate_sigma(points, a.d0, p0, fit.n);

    fp::PartitionLossEstimate partitions;
    if (!a.links.empty()) {
        const std::vector<fp::LinkObservation> links =
            fp::parse_links_csv(read_file(a.links), a.links);
        partitions = a.method == "nnls" ? fp::fit_partitions_nnls(links)
                                        : fp::fit_partitions_composite(links);
        if (!a.site.empty())
            partitions = fp::normalize_loss(std::move(partitions),
                                            load_validated_site(a.site).materials);
    }

    const fp::Report rep = fp::generate_report(ds, fit, partitions);
    emit(a.out_text, rep.text);
    if (!a.out_rows.empty()) write_file(a.out_rows, rep.rows_csv);
    if (!a.out_scatter.empty()) write_file(a.out_scatter, rep.scatter_csv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"femtoprop: indoor RF path loss prediction and measurement analysis"};
    app.require_subcommand(1);

    PredictArgs pa;
    CLI::App* predict = app.add_subcommand("predict", "single-link path loss breakdown");
    predict->add_option("--site", pa.site, "site description file")->required();
    predict->add_option("--tx", pa.tx, "transmitter: node id or (x,y)")->required();
    predict->add_option("--rx", pa.rx, "receiver: node id or (x,y)")->required();
    predict->add_option("--band", pa.band, "carrier frequency, GHz")->required();
    predict->add_option("--csv", pa.csv_path, "write the breakdown as CSV");
    predict->callback([&] { run_predict(pa); });

    CoverageArgs ca;
    CLI::App* coverage = app.add_subcommand("coverage", "path loss grid over an area");
    coverage->add_option("--site", ca.site, "site description file")->required();
    coverage->add_option("--tx", ca.tx, "transmitter node id")->required();
    coverage->add_option("--band", ca.band, "carrier frequency, GHz")->required();
    coverage->add_option("--bounds", ca.bounds, "grid bounds x0,y0,x1,y1 (use --bounds=... for negatives)")
        ->delimiter(',')
        ->expected(4)
        ->required();
    coverage->add_option("--resolution", ca.resolution, "cell size, m")->required();
    coverage->add_option("--out", ca.out_csv, "coverage CSV path (default stdout)");
    coverage->add_option("--pgm", ca.out_pgm, "also write an 8-bit PGM image");
    coverage->callback([&] { run_coverage(ca); });

    FitExponentArgs fa;
    CLI::App* fitexp = app.add_subcommand("fit-exponent", "log-distance exponent and shadowing fit");
    fitexp->add_option("--points", fa.points, "CSV of location_id,distance_m,pl_db")->required();
    fitexp->add_option("--d0", fa.d0, "reference distance, m (default 1)");
    CLI::Option* opt_pl = fitexp->add_option("--pl-d0", fa.pl_d0, "path loss at d0, dB");
    fitexp->add_option("--band", fa.band, "derive pl(d0) from free space at this band, GHz")
        ->excludes(opt_pl);
    fitexp->callback([&] { run_fit_exponent(fa); });

    FitPartitionsArgs fpa;
    CLI::App* fitpart = app.add_subcommand("fit-partitions", "per-material attenuation estimates");
    fitpart->add_option("--links", fpa.links, "link observations CSV")->required();
    fitpart->add_option("--method", fpa.method, "composite or nnls (default composite)")
        ->check(CLI::IsMember({"composite", "nnls"}));
    fitpart->add_option("--site", fpa.site, "site file providing thicknesses for dB/cm");
    fitpart->add_option("--csv", fpa.csv_path, "write estimates as CSV");
    fitpart->callback([&] { run_fit_partitions(fpa); });

    PdpStatsArgs sa;
    CLI::App* stats = app.add_subcommand("pdp-stats", "local-area summary of recorded profiles");
    stats->add_option("--pdp", sa.pdps, "profile file (repeatable)")->required();
    stats->add_option("--cal", sa.cal, "calibration profile file");
    stats->add_option("--distance", sa.distance, "TX-RX distance, m")->required();
    stats->add_option("--band", sa.band, "carrier frequency, GHz")->required();
    stats->add_option("--p-t", sa.p_t, "transmit power, dBm (default 0)");
    stats->add_option("--g-t", sa.g_t, "transmit antenna gain, dBi (default 0)");
    stats->add_option("--g-r", sa.g_r, "receive antenna gain, dBi (default 0)");
    stats->add_option("--dynamic-range", sa.range, "clip range below peak, dB (default 30)");
    stats->add_option("--location", sa.location, "location id for the summary row");
    stats->callback([&] { run_pdp_stats(sa); });

    SimulatePdpArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate-pdp", "synthesize a profile from taps");
    simulate->add_option("--tap", sim.taps, "tap as delay_ns:power_mw (repeatable)")->required();
    simulate->add_option("--delta-tau", sim.delta, "bin width, ns (default 2.5)");
    simulate->add_option("--noise", sim.noise, "per-bin noise floor, mW (default 0)");
    simulate->add_option("--location", sim.location, "location id header");
    simulate->add_option("--p-cal", sim.p_cal, "calibration power header, dBm");
    simulate->add_option("--cal-integral", sim.cal_integral,
                         "calibration integral header (default: profile's own area)");
    simulate->add_option("--out", sim.out, "output file (default stdout)");
    simulate->callback([&] { run_simulate_pdp(sim); });

    ReportArgs ra;
    CLI::App* report = app.add_subcommand("report", "campaign tables, fit, and partition losses");
    report->add_option("--campaign", ra.campaign, "campaign summary CSV")->required();
    report->add_option("--band", ra.band, "carrier frequency, GHz")->required();
    report->add_option("--d0", ra.d0, "reference distance, m (default 1)");
    report->add_option("--pl-d0", ra.pl_d0, "path loss at d0, dB (default: free space)");
    report->add_option("--links", ra.links, "link observations CSV for partition fits");
    report->add_option("--method", ra.method, "composite or nnls (default composite)")
        ->check(CLI::IsMember({"composite", "nnls"}));
    report->add_option("--site", ra.site, "site file providing thicknesses for dB/cm");
    report->add_option("--out-text", ra.out_text, "report text path (default stdout)");
    report->add_option("--out-rows", ra.out_rows, "full-precision campaign CSV path");
    report->add_option("--out-scatter", ra.out_scatter, "distance/pl/model/residual CSV path");
    report->callback([&] { run_report(ra); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
