#include <stdexcept>

#include "cvqkd/units.hpp"
#include "doctest.h"

using namespace cvqkd;

TEST_SUITE_BEGIN("units");

TEST_CASE("grid anchors") {
  const ItuChannel ch34 = itu_channel(34);
  CHECK(ch34.index == 34);
  CHECK(ch34.frequency_thz == doctest::Approx(193.4).epsilon(1e-12));
  CHECK(ch34.wavelength_nm == doctest::Approx(1550.1161220269).epsilon(1e-10));

  const ItuChannel ch58 = itu_channel(58);
  CHECK(ch58.frequency_thz == doctest::Approx(195.8).epsilon(1e-12));
  CHECK(ch58.wavelength_nm == doctest::Approx(1531.1157201226).epsilon(1e-10));

  CHECK(itu_channel(12).frequency_thz == doctest::Approx(191.2).epsilon(1e-12));
}

TEST_CASE("grid covers exactly the C band") {
  CHECK_NOTHROW(itu_channel(12));
  CHECK_NOTHROW(itu_channel(61));
  CHECK_THROWS_AS(itu_channel(11), std::out_of_range);
  CHECK_THROWS_AS(itu_channel(62), std::out_of_range);
  for (int i = 12; i <= 61; ++i) {
    const ItuChannel ch = itu_channel(i);
    CHECK(ch.wavelength_nm >= kCBandMinNm);
    CHECK(ch.wavelength_nm <= kCBandMaxNm);
  }
}

TEST_CASE("grid spacing is 100 GHz and monotone in index") {
  for (int i = 13; i <= 61; ++i) {
    const double df = itu_channel(i).frequency_thz - itu_channel(i - 1).frequency_thz;
    CHECK(df == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(itu_channel(i).wavelength_nm < itu_channel(i - 1).wavelength_nm);
  }
}

TEST_CASE("power conversions") {
  CHECK(dbm_to_mw(0.0) == doctest::Approx(1.0));
  CHECK(dbm_to_mw(-10.0) == doctest::Approx(0.1));
  CHECK(dbm_to_mw(3.0) == doctest::Approx(1.9952623150));
  CHECK(mw_to_dbm(1.0) == doctest::Approx(0.0));
  CHECK(mw_to_dbm(dbm_to_mw(-3.0)) == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK_THROWS_AS(mw_to_dbm(0.0), std::invalid_argument);
  CHECK_THROWS_AS(mw_to_dbm(-1.0), std::invalid_argument);
}

TEST_CASE("fiber transmission") {
  FiberLink link;
  CHECK(link.length_km == doctest::Approx(25.0));
  CHECK(link.alpha_db_per_km == doctest::Approx(0.2));
  CHECK(fiber_transmission(link, 25.0) == doctest::Approx(0.3162277660168379).epsilon(1e-12));
  CHECK(fiber_transmission(link, 50.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(fiber_transmission(link, 0.0) == doctest::Approx(1.0));
  CHECK(link.alpha_lin_per_km() == doctest::Approx(0.04605170186).epsilon(1e-10));
  CHECK_THROWS_AS(fiber_transmission(link, -1.0), std::invalid_argument);
}

TEST_CASE("effective length saturates at 1/alpha") {
  FiberLink link;
  const double l_eff_25 = effective_length_km(link, 25.0);
  CHECK(l_eff_25 == doctest::Approx(14.8479254).epsilon(1e-8));
  CHECK(effective_length_km(link, 1e4) ==
        doctest::Approx(1.0 / link.alpha_lin_per_km()).epsilon(1e-6));
  CHECK(effective_length_km(link, 10.0) < 10.0);
}

TEST_CASE("shot noise reference tag") {
  ShotNoise n0{1.0, NoiseRef::AtBob};
  CHECK(n0.value == doctest::Approx(1.0));
  CHECK(n0.ref == NoiseRef::AtBob);
}

TEST_SUITE_END();
