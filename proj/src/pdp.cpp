#include "femtoprop/pdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "femtoprop/error.hpp"
#include "femtoprop/kernels.hpp"
#include "femtoprop/util.hpp"
#include "textio.hpp"

namespace femtoprop {

namespace {

// rig limits for received-power sanity checks, dBm
constexpr double kMaxPlausibleDbm = -20.0;
constexpr double kMinPlausibleDbm = -85.0;

void check_profile(const PowerDelayProfile& pdp) {
    if (pdp.delta_tau_ns <= 0.0) throw std::domain_error("profile bin width must be positive");
    if (pdp.gains.empty()) throw DataError("profile has no bins");
}

}  // namespace

double integrate_pdp(const PowerDelayProfile& pdp) {
    check_profile(pdp);
    return kern::sum(pdp.gains) * pdp.delta_tau_ns;
}

double narrowband_power(const PowerDelayProfile& pdp, const CalibrationReference& cal) {
    if (cal.cal_integral <= 0.0) throw DataError("calibration integral must be positive");
    const double area = integrate_pdp(pdp);
    if (area <= 0.0) throw DataError("zero-energy profile has no narrowband power");
    return cal.p_cal_dbm + 10.0 * std::log10(area / cal.cal_integral);
}

double path_loss_from_link(double p_t_dbm, double g_t_dbi, double g_r_dbi, double p_rec_dbm) {
    return p_t_dbm + g_t_dbi + g_r_dbi - p_rec_dbm;
}

PowerDelayProfile clip_dynamic_range(const PowerDelayProfile& pdp, double range_db) {
    if (range_db <= 0.0) throw std::domain_error("dynamic range must be positive");
    check_profile(pdp);
    PowerDelayProfile out = pdp;
    const double peak = kern::max_value(out.gains);
    if (peak <= 0.0) return out;
    kern::zero_below(out.gains, peak * std::pow(10.0, -range_db / 10.0));
    return out;
}

double rms_delay_spread(const PowerDelayProfile& pdp) {
    check_profile(pdp);
    const kern::BinMoments m = kern::bin_moments(pdp.gains);
    if (m.m0 <= 0.0) throw DataError("zero-energy profile has no delay spread");
    const double mean = m.m1 / m.m0;
    // second central moment, accumulated directly: the raw-moment difference
    // m2/m0 - mean^2 cancels catastrophically when the spread is far smaller
    // than the mean delay
    double central = 0.0;
    for (std::size_t k = 0; k < pdp.gains.size(); ++k) {
        const double dev = double(k) - mean;
        central += pdp.gains[k] * dev * dev;
    }
    return std::sqrt(central / m.m0) * pdp.delta_tau_ns;
}

PowerDelayProfile average_local_area(const std::vector<PowerDelayProfile>& pdps) {
    if (pdps.empty()) throw DataError("cannot average an empty profile set");
    PowerDelayProfile out;
    out.delta_tau_ns = pdps.front().delta_tau_ns;
    out.location = pdps.front().location;
    std::size_t bins = 0;
    for (const PowerDelayProfile& p : pdps) {
        check_profile(p);
        if (p.delta_tau_ns != out.delta_tau_ns)
            throw DataError("cannot average profiles with different bin widths");
        bins = std::max(bins, p.gains.size());
    }
    out.gains.assign(bins, 0.0);
    for (const PowerDelayProfile& p : pdps) {
        kern::accumulate(std::span(out.gains).first(p.gains.size()), p.gains);
    }
    kern::scale(out.gains, 1.0 / double(pdps.size()));
    return out;
}

PowerDelayProfile synthesize_pdp(const std::vector<Tap>& taps, double delta_tau_ns,
                                 double noise_floor_mw) {
    if (delta_tau_ns <= 0.0) throw std::domain_error("bin width must be positive");
    if (noise_floor_mw < 0.0) throw std::domain_error("noise floor must be nonnegative");
    std::size_t bins = 1;
    for (const Tap& t : taps) {
        if (t.delay_ns < 0.0) throw std::domain_error("tap delay must be nonnegative");
        if (t.power_mw < 0.0) throw std::domain_error("tap power must be nonnegative");
        bins = std::max(bins, std::size_t(std::floor(t.delay_ns / delta_tau_ns)) + 1);
    }
    PowerDelayProfile out;
    out.delta_tau_ns = delta_tau_ns;
    out.gains.assign(bins, noise_floor_mw);
    for (const Tap& t : taps)
        out.gains[std::size_t(std::floor(t.delay_ns / delta_tau_ns))] += t.power_mw;
    return out;
}

PdpFile parse_pdp(const std::string& text, const std::string& source) {
    using textio::Field;
    PdpFile out;
    bool saw_delta = false;
    std::vector<std::string_view> lines = textio::split_lines(text);
    std::vector<double> gains;
    std::set<long> seen;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int ln = int(li) + 1;
        std::string_view line = lines[li];
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string_view body = line.substr(1);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            const std::size_t eq = body.find('=');
            if (eq == std::string_view::npos) continue;  // plain comment
            const std::string key(body.substr(0, eq));
            const Field value{std::string(body.substr(eq + 1)), int(line.size() - body.size() + eq) + 2};
            if (key == "delta_tau_ns") {
                out.pdp.delta_tau_ns = textio::parse_double(value, source, ln);
                if (out.pdp.delta_tau_ns <= 0.0)
                    throw ParseError(source, ln, value.column, "bin width must be positive");
                saw_delta = true;
            } else if (key == "p_cal_dbm") {
                out.p_cal_dbm = textio::parse_double(value, source, ln);
            } else if (key == "cal_integral") {
                out.cal_integral = textio::parse_double(value, source, ln);
            } else if (key == "location") {
                out.pdp.location = value.text;
            }
            continue;
        }
        const std::vector<Field> f = textio::split_csv(line);
        if (f.size() == 2 && f[0].text == "bin_index" && f[1].text == "linear_gain") continue;
        if (f.size() != 2)
            throw ParseError(source, ln, 1, "expected `bin_index,linear_gain`");
        const long idx = textio::parse_int(f[0], source, ln);
        const double gain = textio::parse_double(f[1], source, ln);
        if (idx < 0) throw ParseError(source, ln, f[0].column, "negative bin index");
        if (gain < 0.0) throw ParseError(source, ln, f[1].column, "negative linear gain");
        if (!seen.insert(idx).second)
            throw ParseError(source, ln, f[0].column, "duplicate bin " + std::to_string(idx));
        if (std::size_t(idx) >= gains.size()) gains.resize(std::size_t(idx) + 1, 0.0);
        gains[std::size_t(idx)] = gain;
    }
    if (gains.empty()) throw ParseError(source, int(lines.size()), 1, "profile has no bins");
    if (!saw_delta) out.pdp.delta_tau_ns = 2.5;  // rig default
    out.pdp.gains = std::move(gains);
    return out;
}

PdpFile load_pdp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open profile '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pdp(buf.str(), path);
}

std::string serialize_pdp(const PowerDelayProfile& pdp, const CalibrationReference* cal) {
    std::string out = "# delta_tau_ns=" + fmt_double(pdp.delta_tau_ns) + "\n";
    if (cal != nullptr) {
        out += "# p_cal_dbm=" + fmt_double(cal->p_cal_dbm) + "\n";
        out += "# cal_integral=" + fmt_double(cal->cal_integral) + "\n";
    }
    if (!pdp.location.empty()) out += "# location=" + pdp.location + "\n";
    out += "bin_index,linear_gain\n";
    for (std::size_t i = 0; i < pdp.gains.size(); ++i)
        out += std::to_string(i) + "," + fmt_double(pdp.gains[i]) + "\n";
    return out;
}

CalibrationReference calibration_from(const PdpFile& file) {
    if (!file.p_cal_dbm) throw DataError("calibration profile lacks a p_cal_dbm header");
    CalibrationReference cal;
    cal.p_cal_dbm = *file.p_cal_dbm;
    cal.cal_integral = file.cal_integral ? *file.cal_integral : integrate_pdp(file.pdp);
    if (cal.cal_integral <= 0.0) throw DataError("calibration integral must be positive");
    return cal;
}

std::optional<std::string> plausibility_warning(double p_rec_dbm) {
    if (p_rec_dbm > kMaxPlausibleDbm)
        return "received power " + fmt_double(p_rec_dbm) + " dBm is above the measurable window [" +
               fmt_double(kMinPlausibleDbm) + ", " + fmt_double(kMaxPlausibleDbm) + "] dBm";
    if (p_rec_dbm < kMinPlausibleDbm)
        return "received power " + fmt_double(p_rec_dbm) + " dBm is below the measurable window [" +
               fmt_double(kMinPlausibleDbm) + ", " + fmt_double(kMaxPlausibleDbm) + "] dBm";
    return std::nullopt;
}

}  // namespace femtoprop
