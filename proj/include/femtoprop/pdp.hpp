#pragma once

#include <optional>
#include <string>
#include <vector>

namespace femtoprop {

/// Uniformly binned multipath power record. Gains are linear,
/// milliwatt-proportional; bin k covers excess delay k * delta_tau_ns.
struct PowerDelayProfile {
    double delta_tau_ns = 2.5;
    std::vector<double> gains;
    std::string location;
};

/// Back-to-back calibration: a profile of known input power and its
/// integrated area, against which measured profiles are ratioed.
struct CalibrationReference {
    double p_cal_dbm = 0.0;
    double cal_integral = 1.0;  // linear power x ns
};

struct Tap {
    double delay_ns = 0.0;
    double power_mw = 0.0;
};

/// Area under the profile: sum(gains) * delta_tau_ns.
double integrate_pdp(const PowerDelayProfile& pdp);

/// p_cal + 10*log10(area / cal_integral), dBm. Throws DataError on a
/// zero-energy profile.
double narrowband_power(const PowerDelayProfile& pdp, const CalibrationReference& cal);

/// p_t + g_t + g_r - p_rec, dB.
double path_loss_from_link(double p_t_dbm, double g_t_dbi, double g_r_dbi, double p_rec_dbm);

/// Copy with every bin more than range_db below the peak set to zero.
PowerDelayProfile clip_dynamic_range(const PowerDelayProfile& pdp, double range_db);

/// Power-weighted second central moment of excess delay, ns. Throws
/// DataError on a zero-energy profile. Callers wanting the measurement-rig
/// behavior clip to the rig's dynamic range first.
double rms_delay_spread(const PowerDelayProfile& pdp);

/// Bin-wise linear mean; shorter profiles are zero-padded to the longest.
/// Throws DataError on an empty list or mismatched delta_tau_ns.
PowerDelayProfile average_local_area(const std::vector<PowerDelayProfile>& pdps);

/// Deposit each tap's power into bin floor(delay / delta_tau) and add a
/// constant noise floor to every bin.
PowerDelayProfile synthesize_pdp(const std::vector<Tap>& taps, double delta_tau_ns = 2.5,
                                 double noise_floor_mw = 0.0);

/// Profile file: '#'-prefixed headers delta_tau_ns, p_cal_dbm, cal_integral,
/// location, then `bin_index,linear_gain` rows. Calibration profiles use the
/// same format.
struct PdpFile {
    PowerDelayProfile pdp;
    std::optional<double> p_cal_dbm;
    std::optional<double> cal_integral;
};

PdpFile parse_pdp(const std::string& text, const std::string& source = "<pdp>");
PdpFile load_pdp(const std::string& path);
std::string serialize_pdp(const PowerDelayProfile& pdp, const CalibrationReference* cal = nullptr);

/// Calibration carried by a file: explicit cal_integral header wins,
/// otherwise the profile's own area. Throws DataError without p_cal_dbm.
CalibrationReference calibration_from(const PdpFile& file);

/// Rig plausibility window for received power; out-of-range values warn,
/// never fail, since synthetic data may exceed the hardware's limits.
std::optional<std::string> plausibility_warning(double p_rec_dbm);

}  // namespace femtoprop
