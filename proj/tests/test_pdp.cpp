#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "femtoprop/error.hpp"
#include "femtoprop/pdp.hpp"
#include "femtoprop/util.hpp"

using namespace femtoprop;

TEST_CASE("integration: hand sums") {
    CHECK(integrate_pdp({2.5, {1.0}, ""}) == 2.5);
    CHECK(integrate_pdp({2.5, {0.0, 0.0, 0.0}, ""}) == 0.0);
    CHECK(integrate_pdp({2.5, {1.0, 2.0, 3.0}, ""}) == 15.0);
}

TEST_CASE("narrowband power is the calibrated integral ratio") {
    const CalibrationReference cal{-7.0, 5.0};
    CHECK(narrowband_power({2.5, {2.0}, ""}, cal) == doctest::Approx(-7.0).epsilon(1e-15));
    CHECK(narrowband_power({2.5, {20.0}, ""}, cal) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(narrowband_power({2.5, {0.0, 0.0}, ""}, cal), DataError);
}

TEST_CASE("narrowband power matches the closed-form tap sum") {
    // taps in mW: power is 10*log10(sum) when the calibration is 0 dBm with
    // a unit-area reference and the integral cancels delta_tau
    const std::vector<Tap> taps = {{0.0, 0.8}, {20.0, 0.15}};
    const PowerDelayProfile pdp = synthesize_pdp(taps, 2.5);
    const CalibrationReference cal{0.0, 2.5};  // one unit bin
    const double expect = 10.0 * std::log10(0.95);
    CHECK(narrowband_power(pdp, cal) == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("link path loss arithmetic") {
    CHECK(path_loss_from_link(0.0, 6.0, 6.0, -52.0) == 64.0);
    CHECK(path_loss_from_link(-10.0, 25.0, 25.0, -58.0) == 98.0);
    CHECK(path_loss_from_link(0.0, 0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("dynamic range clipping") {
    const PowerDelayProfile flat{2.5, {1.0, 1.0, 1.0}, ""};
    CHECK(clip_dynamic_range(flat, 30.0).gains == flat.gains);

    // 0 dB and -40 dB taps: the weak one dies at a 30 dB range
    const PowerDelayProfile wide{2.5, {1.0, 1e-4}, ""};
    const PowerDelayProfile clipped = clip_dynamic_range(wide, 30.0);
    CHECK(clipped.gains[0] == 1.0);
    CHECK(clipped.gains[1] == 0.0);

    // 0 / -10 / -29.9 dB: all inside the range
    const PowerDelayProfile tight{2.5, {1.0, 0.1, std::pow(10.0, -2.99)}, ""};
    const PowerDelayProfile kept = clip_dynamic_range(tight, 30.0);
    CHECK(kept.gains[2] > 0.0);

    // idempotent
    const PowerDelayProfile twice = clip_dynamic_range(clipped, 30.0);
    CHECK(twice.gains == clipped.gains);
}

TEST_CASE("rms delay spread closed forms") {
    CHECK(rms_delay_spread(synthesize_pdp({{7.5, 2.0}})) == 0.0);
    CHECK(rms_delay_spread(synthesize_pdp({{0.0, 1.0}, {10.0, 1.0}})) ==
          doctest::Approx(5.0).epsilon(1e-12));
    CHECK(rms_delay_spread(synthesize_pdp({{0.0, 1.0}, {20.0, 0.25}})) ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK_THROWS_AS(rms_delay_spread({2.5, {0.0}, ""}), DataError);
}

TEST_CASE("rms delay spread ignores uniform gain scale and delay shift") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Tap> taps;
        const int n = 2 + int(rng.below(6));
        for (int i = 0; i < n; ++i)
            taps.push_back({2.5 * double(rng.below(40)), rng.uniform(0.1, 2.0)});
        const double base = rms_delay_spread(synthesize_pdp(taps));

        std::vector<Tap> scaled = taps;
        for (Tap& t : scaled) t.power_mw *= 37.5;
        CHECK(rms_delay_spread(synthesize_pdp(scaled)) == doctest::Approx(base).epsilon(1e-12));

        std::vector<Tap> shifted = taps;
        for (Tap& t : shifted) t.delay_ns += 25.0;  // whole bins, exact in the binned domain
        CHECK(rms_delay_spread(synthesize_pdp(shifted)) == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("local-area averaging is linear, not logarithmic") {
    const PowerDelayProfile a{2.5, {1.0}, ""};
    const PowerDelayProfile b{2.5, {10.0}, ""};
    const PowerDelayProfile avg = average_local_area({a, b});
    REQUIRE(avg.gains.size() == 1);
    CHECK(avg.gains[0] == doctest::Approx(5.5).epsilon(1e-15));

    const PowerDelayProfile same = average_local_area({a, a, a});
    CHECK(same.gains == a.gains);

    CHECK_THROWS_AS(average_local_area({}), DataError);
    CHECK_THROWS_AS(average_local_area({a, {5.0, {1.0}, ""}}), DataError);
}

TEST_CASE("averaging zero-pads shorter profiles and matches a hand mean") {
    SplitMix64 rng(123);
    std::vector<PowerDelayProfile> pdps;
    std::size_t longest = 0;
    for (int i = 0; i < 40; ++i) {
        PowerDelayProfile p{2.5, {}, ""};
        const std::size_t bins = 1 + rng.below(30);
        longest = std::max(longest, bins);
        for (std::size_t k = 0; k < bins; ++k) p.gains.push_back(rng.uniform(0.0, 3.0));
        pdps.push_back(std::move(p));
    }
    const PowerDelayProfile avg = average_local_area(pdps);
    REQUIRE(avg.gains.size() == longest);
    for (std::size_t k = 0; k < longest; ++k) {
        double s = 0.0;
        for (const PowerDelayProfile& p : pdps) s += k < p.gains.size() ? p.gains[k] : 0.0;
        const double expect = s / double(pdps.size());
        CHECK(avg.gains[k] == doctest::Approx(expect).epsilon(1e-12));
    }

    // integral linearity
    double mean_area = 0.0;
    for (const PowerDelayProfile& p : pdps) mean_area += integrate_pdp(p);
    mean_area /= double(pdps.size());
    CHECK(integrate_pdp(avg) == doctest::Approx(mean_area).epsilon(1e-12));
}

TEST_CASE("synthesis binning rules") {
    const PowerDelayProfile single = synthesize_pdp({{0.0, 1.0}});
    REQUIRE(single.gains.size() == 1);
    CHECK(single.gains[0] == 1.0);

    const PowerDelayProfile merged = synthesize_pdp({{1.0, 0.5}, {1.4, 0.25}});
    REQUIRE(merged.gains.size() == 1);
    CHECK(merged.gains[0] == doctest::Approx(0.75).epsilon(1e-15));

    const PowerDelayProfile boundary = synthesize_pdp({{2.5, 1.0}});
    REQUIRE(boundary.gains.size() == 2);
    CHECK(boundary.gains[0] == 0.0);
    CHECK(boundary.gains[1] == 1.0);

    const PowerDelayProfile noisy = synthesize_pdp({{0.0, 1.0}}, 2.5, 0.125);
    CHECK(noisy.gains[0] == doctest::Approx(1.125).epsilon(1e-15));

    CHECK_THROWS_AS(synthesize_pdp({{-1.0, 1.0}}), std::domain_error);
    CHECK_THROWS_AS(synthesize_pdp({{1.0, -1.0}}), std::domain_error);
}

TEST_CASE("gain scaling shifts narrowband power by exactly 10 log10 c") {
    SplitMix64 rng(31337);
    const CalibrationReference cal{-10.0, 4.0};
    for (int trial = 0; trial < 100; ++trial) {
        PowerDelayProfile p{2.5, {}, ""};
        const std::size_t bins = 1 + rng.below(50);
        for (std::size_t k = 0; k < bins; ++k) p.gains.push_back(rng.uniform(0.01, 2.0));
        const double c = std::pow(10.0, rng.uniform(-2.0, 2.0));
        PowerDelayProfile scaled = p;
        for (double& g : scaled.gains) g *= c;
        const double lhs = narrowband_power(scaled, cal);
        const double rhs = narrowband_power(p, cal) + 10.0 * std::log10(c);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("pdp file round trip with calibration headers") {
    PowerDelayProfile p{2.5, {1.0, 0.0, 0.25}, "loc 4.2"};
    const CalibrationReference cal{-7.5, 3.125};
    const std::string text = serialize_pdp(p, &cal);
    const PdpFile file = parse_pdp(text);
    CHECK(file.pdp.delta_tau_ns == 2.5);
    CHECK(file.pdp.gains == p.gains);
    CHECK(file.pdp.location == "loc 4.2");
    REQUIRE(file.p_cal_dbm.has_value());
    CHECK(*file.p_cal_dbm == -7.5);
    REQUIRE(file.cal_integral.has_value());
    CHECK(*file.cal_integral == 3.125);

    const CalibrationReference from = calibration_from(file);
    CHECK(from.p_cal_dbm == -7.5);
    CHECK(from.cal_integral == 3.125);
}

TEST_CASE("pdp parsing: defaults, sparse bins, and failure modes") {
    const PdpFile sparse = parse_pdp("bin_index,linear_gain\n0,1.0\n8,0.25\n");
    CHECK(sparse.pdp.delta_tau_ns == 2.5);  // header absent, canonical default
    REQUIRE(sparse.pdp.gains.size() == 9);
    CHECK(sparse.pdp.gains[8] == 0.25);
    CHECK(sparse.pdp.gains[3] == 0.0);
    CHECK_FALSE(sparse.p_cal_dbm.has_value());

    CHECK_THROWS_AS(parse_pdp(""), ParseError);
    CHECK_THROWS_AS(parse_pdp("bin_index,linear_gain\n"), ParseError);         // no rows
    CHECK_THROWS_AS(parse_pdp("0,1.0\n0,2.0\n"), ParseError);                  // dup bin
    CHECK_THROWS_AS(parse_pdp("0,1.0\n1,0.0\n1,0.0\n"), ParseError);           // dup zero bin
    CHECK_THROWS_AS(parse_pdp("-1,1.0\n"), ParseError);                        // negative bin
    CHECK_THROWS_AS(parse_pdp("0,-0.5\n"), ParseError);                        // negative gain
    CHECK_THROWS_AS(parse_pdp("# delta_tau_ns=0\n0,1.0\n"), ParseError);       // bad delta

    try {
        parse_pdp("0,1.0\nbogus line\n", "p.pdp");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.source() == "p.pdp");
        CHECK(e.line() == 2);
    }
}

TEST_CASE("calibration extraction needs a power header") {
    const PdpFile no_power = parse_pdp("0,2.0\n");
    CHECK_THROWS_AS(calibration_from(no_power), DataError);

    // without an explicit integral the profile's own area stands in
    const PdpFile implicit = parse_pdp("# p_cal_dbm=-5\n0,2.0\n");
    const CalibrationReference cal = calibration_from(implicit);
    CHECK(cal.p_cal_dbm == -5.0);
    CHECK(cal.cal_integral == 5.0);
}

TEST_CASE("plausibility window warns outside the rig limits") {
    CHECK_FALSE(plausibility_warning(-50.0).has_value());
    CHECK(plausibility_warning(-10.0).has_value());
    CHECK(plausibility_warning(-90.0).has_value());
    CHECK_FALSE(plausibility_warning(-20.0).has_value());
    CHECK_FALSE(plausibility_warning(-85.0).has_value());
}

TEST_CASE("preset link budget reproduces its path loss end to end") {
    // choose taps so received power is exactly -52 dBm against the reference
    const CalibrationReference cal{0.0, 2.5};
    const double target_mw = std::pow(10.0, -5.2);
    const PowerDelayProfile pdp = synthesize_pdp({{0.0, 0.6 * target_mw}, {5.0, 0.4 * target_mw}});
    const double p_rec = narrowband_power(pdp, cal);
    CHECK(path_loss_from_link(0.0, 6.0, 6.0, p_rec) == doctest::Approx(64.0).epsilon(1e-4));
}
