#include <doctest.h>

#include "rislab/metrics.hpp"

using namespace rislab::metrics;

TEST_CASE("MOS calibration hits both anchors") {
    const MosParams p = calibrate_mos(1e5, 1e7);
    CHECK(p.lambda == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(mos(1e5, p) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mos(1e7, p) == doctest::Approx(4.5).epsilon(1e-9));
}

TEST_CASE("MOS midpoint oracle 2.75") {
    const MosParams p = calibrate_mos(1e5, 1e7);
    CHECK(mos(1e6, p) == doctest::Approx(2.75).epsilon(1e-9));
}

TEST_CASE("MOS clamps outside the anchors") {
    const MosParams p = calibrate_mos(1e5, 1e7);
    CHECK(mos(1e3, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mos(1e9, p) == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(mos(0.0, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mos(-5.0, p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("MOS is non-decreasing in rate") {
    const MosParams p = calibrate_mos(1e5, 1e7);
    double prev = 0.0;
    for (double r = 1e4; r < 1e8; r *= 1.5) {
        const double q = mos(r, p);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("total power oracle 12.103") {
    PowerModel pm; // 0.01 / 7.943 / 0.25
    CHECK(total_power(0.1, 6, 16, pm) == doctest::Approx(12.103).epsilon(1e-12));
}

TEST_CASE("energy efficiency oracle") {
    CHECK(energy_efficiency(15.0, 12.103) ==
          doctest::Approx(15.0 / 12.103).epsilon(1e-12));
    CHECK(energy_efficiency(15.0, 12.103) == doctest::Approx(1.2394).epsilon(1e-4));
}

TEST_CASE("step reward is the EE difference") {
    CHECK(step_reward(1.5, 1.2) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(step_reward(1.0, 1.4) == doctest::Approx(-0.4).epsilon(1e-12));
}
