#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "cvqkd/noise.hpp"
#include "doctest.h"

using namespace cvqkd;

namespace {

WdmChannel make_channel(int index, Direction dir, double power_dbm,
                        Modulation mod = Modulation::Continuous) {
  return {itu_channel(index), dir, power_dbm, mod};
}

CoexistScenario single_channel_scenario(int index, Direction dir, double power_dbm,
                                        double length_km = 25.0) {
  CoexistScenario s;
  s.link.length_km = length_km;
  s.channels.push_back(make_channel(index, dir, power_dbm));
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("noise");

TEST_CASE("mux side efficiency and isolation lookup") {
  MuxSpec mux;
  CHECK(mux.side_efficiency() == doctest::Approx(0.8912509381).epsilon(1e-10));
  CHECK(mux.isolation_db(1) == doctest::Approx(-40.0));
  CHECK(mux.isolation_db(-1) == doctest::Approx(-40.0));
  CHECK(mux.isolation_db(2) == doctest::Approx(-80.0));
  CHECK(mux.isolation_db(-24) == doctest::Approx(-80.0));
}

TEST_CASE("channel transmission composes add, fiber, drop") {
  FiberLink link;
  MuxSpec mux;
  CHECK(channel_transmission(link, mux) == doctest::Approx(0.2511886432).epsilon(1e-10));
  link.length_km = 50.0;
  CHECK(channel_transmission(link, mux) == doctest::Approx(0.0794328235).epsilon(1e-9));
  link.length_km = 75.0;
  CHECK(channel_transmission(link, mux) == doctest::Approx(0.0251188643).epsilon(1e-9));
}

TEST_CASE("raman geometry: forward peak and backward saturation") {
  FiberLink link;
  CHECK(raman_geometry_km(link, 25.0, Direction::Forward) ==
        doctest::Approx(7.90569415).epsilon(1e-9));
  CHECK(raman_geometry_km(link, 25.0, Direction::Backward) ==
        doctest::Approx(9.771625843).epsilon(1e-9));
  CHECK(raman_geometry_km(link, 50.0, Direction::Forward) ==
        doctest::Approx(5.0).epsilon(1e-9));
  CHECK(raman_geometry_km(link, 100.0, Direction::Backward) ==
        doctest::Approx(10.85627631).epsilon(1e-9));

  // forward curve peaks at 1/alpha
  const double peak = 1.0 / link.alpha_lin_per_km();
  CHECK(raman_geometry_km(link, peak, Direction::Forward) >
        raman_geometry_km(link, peak - 0.5, Direction::Forward));
  CHECK(raman_geometry_km(link, peak, Direction::Forward) >
        raman_geometry_km(link, peak + 0.5, Direction::Forward));

  // backward curve approaches 1/(2 alpha) monotonically
  const double asym = 1.0 / (2.0 * link.alpha_lin_per_km());
  CHECK(raman_geometry_km(link, 100.0, Direction::Backward) ==
        doctest::Approx(asym).epsilon(1e-3));
  CHECK(raman_geometry_km(link, 100.0, Direction::Backward) < asym);
}

TEST_CASE("raman matched photons magnitude") {
  FiberLink link;
  const double quantum_nm = 1531.1157201226;

  const WdmChannel fwd = make_channel(34, Direction::Forward, 0.0);
  const double n_fwd =
      raman_matched_photons(fwd, link, RamanProfile::flat(3e-9), 1.0, quantum_nm);
  CHECK(n_fwd == doctest::Approx(7.147561137e-4).epsilon(1e-8));

  // output-form excess noise at unit efficiencies (calibration form)
  CHECK(matched_noise_to_excess(n_fwd, 1.0) ==
        doctest::Approx(1.429512227e-3).epsilon(1e-8));

  const WdmChannel bwd = make_channel(34, Direction::Backward, 0.0);
  const double n_bwd =
      raman_matched_photons(bwd, link, RamanProfile::flat(3e-9), 1.0, quantum_nm);
  CHECK(n_bwd / n_fwd == doctest::Approx(1.236023764).epsilon(1e-9));

  // linear in launch power and in beta
  const WdmChannel fwd3 = make_channel(34, Direction::Forward, mw_to_dbm(3.0));
  CHECK(raman_matched_photons(fwd3, link, RamanProfile::flat(3e-9), 1.0, quantum_nm) ==
        doctest::Approx(3.0 * n_fwd).epsilon(1e-9));
  CHECK(raman_matched_photons(fwd, link, RamanProfile::flat(2.8e-9), 1.0, quantum_nm) ==
        doctest::Approx(1.334211412e-3 / 2.0).epsilon(1e-8));

  // drop efficiency scales linearly
  CHECK(raman_matched_photons(fwd, link, RamanProfile::flat(3e-9), 0.5, quantum_nm) ==
        doctest::Approx(0.5 * n_fwd).epsilon(1e-9));
}

TEST_CASE("excess noise detector and input referral") {
  // chaotic matched noise: xi_out = 2 eta_b n
  CHECK(matched_noise_to_excess(1e-3, 0.6) == doctest::Approx(1.2e-3).epsilon(1e-12));
  CHECK(matched_noise_to_excess(0.0, 0.6) == doctest::Approx(0.0));

  // input referral inverts the channel scaling at machine precision
  const double xi_out = 3.7e-3;
  const double t = 0.2511886432;
  const double back = excess_to_input_referred(xi_out, 1.0, t);
  CHECK(back * t == doctest::Approx(xi_out).epsilon(1e-14));
  CHECK_THROWS_AS(excess_to_input_referred(1e-3, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(excess_to_input_referred(1e-3, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("photons per slot") {
  CHECK(photons_per_slot(1.0, 1531.1157201226, 50.0) ==
        doctest::Approx(3.853907507e8).epsilon(1e-8));
  CHECK(photons_per_slot(0.0, 1531.1157201226, 50.0) == doctest::Approx(0.0));
}

TEST_CASE("leakage anchors at both isolation tiers") {
  MuxSpec mux;
  CvqkdSystem sys;
  const std::vector<WdmChannel> adjacent = {make_channel(59, Direction::Forward, 0.0)};
  CHECK(leakage_noise(adjacent, mux, sys) == doctest::Approx(6e-5).epsilon(1e-7));

  const std::vector<WdmChannel> far = {make_channel(34, Direction::Forward, 0.0)};
  CHECK(leakage_noise(far, mux, sys) == doctest::Approx(6e-9).epsilon(1e-7));

  // additive across channels, linear in power
  std::vector<WdmChannel> both = adjacent;
  both.push_back(far[0]);
  CHECK(leakage_noise(both, mux, sys) ==
        doctest::Approx(6e-5 + 6e-9).epsilon(1e-7));
  const std::vector<WdmChannel> strong = {make_channel(59, Direction::Forward, 10.0)};
  CHECK(leakage_noise(strong, mux, sys) == doctest::Approx(6e-4).epsilon(1e-7));
}

TEST_CASE("fwm anchor and frequency condition") {
  FiberLink link;
  MuxSpec mux;
  CvqkdSystem sys;
  const ItuChannel quantum = itu_channel(58);

  // 2*56 - 54 = 58: product lands on the quantum channel
  const WdmChannel p1 = make_channel(56, Direction::Forward, 0.0);
  const WdmChannel p2 = make_channel(54, Direction::Forward, 0.0);
  CHECK(fwm_noise(p1, p2, link, quantum, mux, sys) == doctest::Approx(6e-4).epsilon(1e-7));

  // condition fails: no product
  const WdmChannel p3 = make_channel(40, Direction::Forward, 0.0);
  CHECK(fwm_noise(p1, p3, link, quantum, mux, sys) == doctest::Approx(0.0));

  // cubic power scaling: both pumps +3 dB -> 8x
  const WdmChannel q1 = make_channel(56, Direction::Forward, mw_to_dbm(2.0));
  const WdmChannel q2 = make_channel(54, Direction::Forward, mw_to_dbm(2.0));
  CHECK(fwm_noise(q1, q2, link, quantum, mux, sys) ==
        doctest::Approx(8.0 * 6e-4).epsilon(1e-7));

  CHECK_THROWS_AS(fwm_noise(p1, p1, link, quantum, mux, sys), std::invalid_argument);
}

TEST_CASE("ase anchor") {
  MuxSpec mux;
  CvqkdSystem sys;
  CHECK(ase_noise(100.0, 1.5, mux, sys) == doctest::Approx(6e-7).epsilon(1e-7));
  CHECK(ase_noise(1.0, 1.5, mux, sys) == doctest::Approx(0.0));  // passive line
  CHECK_THROWS_AS(ase_noise(0.5, 1.5, mux, sys), std::invalid_argument);
  CHECK_THROWS_AS(ase_noise(100.0, 0.9, mux, sys), std::invalid_argument);
}

TEST_CASE("sideband anchor") {
  FiberLink link;
  MuxSpec mux;
  CvqkdSystem sys;
  const WdmChannel adjacent = make_channel(59, Direction::Forward, 0.0);
  CHECK(sideband_noise(adjacent, mux, link, sys) ==
        doctest::Approx(2.4e-4).epsilon(1e-7));
  // default suppression is -40 dB; 10 dB more suppression is 10x less noise
  CHECK(sideband_noise(adjacent, mux, link, sys, -50.0) ==
        doctest::Approx(2.4e-5).epsilon(1e-7));
  CHECK_THROWS_AS(sideband_noise(adjacent, mux, link, sys, 0.0), std::invalid_argument);
}

TEST_CASE("xpm anchor and overlap conventions") {
  FiberLink link;
  CvqkdSystem sys;
  const WdmChannel ook = make_channel(34, Direction::Forward, 0.0,
                                      Modulation::OnOffKeying);
  CHECK(xpm_noise(ook, link, sys, XpmOverlap::WorstCase) ==
        doctest::Approx(1.3e-5).epsilon(1e-7));
  CHECK(xpm_noise(ook, link, sys, XpmOverlap::Uniform) ==
        doctest::Approx(4.333333387e-6).epsilon(1e-7));
  CHECK(xpm_noise(ook, link, sys, XpmOverlap::None) == doctest::Approx(0.0));

  // continuous carriers do not dephase
  const WdmChannel cw = make_channel(34, Direction::Forward, 0.0);
  CHECK(xpm_noise(cw, link, sys, XpmOverlap::WorstCase) == doctest::Approx(0.0));

  // saturation with distance: effective length capped at 1/alpha
  FiberLink longhaul = link;
  longhaul.length_km = 1e4;
  CHECK(xpm_noise(ook, longhaul, sys, XpmOverlap::WorstCase) ==
        doctest::Approx(2.780484222e-5).epsilon(1e-4));
}

TEST_CASE("raman profile interpolation and csv round trip") {
  RamanProfile flat = RamanProfile::flat(3e-9);
  CHECK(flat.beta(1531.0) == doctest::Approx(3e-9));
  CHECK(flat.beta(1600.0) == doctest::Approx(3e-9));  // clamped

  RamanProfile sloped = RamanProfile::from_csv(QKD_DATA_DIR "/raman_sloped.csv");
  CHECK(sloped.entries.size() == 5);
  CHECK(sloped.beta(1530.0) == doctest::Approx(2.70e-9).epsilon(1e-12));
  CHECK(sloped.beta(1545.0) == doctest::Approx(0.5 * (2.85e-9 + 3.00e-9)).epsilon(1e-12));
  CHECK(sloped.beta(1500.0) == doctest::Approx(2.70e-9).epsilon(1e-12));
  CHECK(sloped.beta(1570.0) == doctest::Approx(3.30e-9).epsilon(1e-12));

  const std::string tmp =
      (std::filesystem::temp_directory_path() / "cvqkd_profile_roundtrip.csv").string();
  sloped.to_csv(tmp);
  RamanProfile back = RamanProfile::from_csv(tmp);
  REQUIRE(back.entries.size() == sloped.entries.size());
  for (std::size_t i = 0; i < back.entries.size(); ++i) {
    CHECK(back.entries[i].pump_nm ==
          doctest::Approx(sloped.entries[i].pump_nm).epsilon(1e-9));
    CHECK(back.entries[i].beta_per_km_nm ==
          doctest::Approx(sloped.entries[i].beta_per_km_nm).epsilon(1e-9));
  }
  std::remove(tmp.c_str());

  RamanProfile bad;
  bad.entries = {{1540.0, 1531.0, 2e-9}, {1530.0, 1531.0, 3e-9}};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("fit recovers coefficients from the bundled measurement set") {
  FiberLink link;
  const auto profile = [&] {
    std::vector<RamanMeasurement> ms;
    // parse the bundled CSV by hand to keep the test independent of the CLI
    std::FILE* f = std::fopen(QKD_DATA_DIR "/raman_measurements.csv", "r");
    REQUIRE(f != nullptr);
    char line[256];
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);  // header
    while (std::fgets(line, sizeof line, f)) {
      RamanMeasurement m;
      char dir[16] = {0};
      REQUIRE(std::sscanf(line, "%lf,%lf,%15[^,],%lf,%lf", &m.pump_nm, &m.length_km,
                          dir, &m.power_in_mw, &m.scattered_mw) == 5);
      m.direction = dir[0] == 'f' ? Direction::Forward : Direction::Backward;
      ms.push_back(m);
    }
    std::fclose(f);
    REQUIRE(ms.size() == 12);
    return fit_raman_coefficient(ms, link, 0.8, 1531.1157196);
  }();
  REQUIRE(profile.entries.size() == 2);
  CHECK(profile.entries[0].pump_nm == doctest::Approx(1546.12));
  CHECK(profile.entries[0].beta_per_km_nm ==
        doctest::Approx(2.892527843295e-9).epsilon(1e-9));
  CHECK(profile.entries[1].pump_nm == doctest::Approx(1554.13));
  CHECK(profile.entries[1].beta_per_km_nm ==
        doctest::Approx(3.281949261700e-9).epsilon(1e-9));
}

TEST_CASE("fit on exact synthetic data is exact") {
  FiberLink link;
  std::vector<RamanMeasurement> ms;
  const double beta = 3.1e-9;
  for (double length : {10.0, 30.0, 60.0}) {
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      RamanMeasurement m;
      m.pump_nm = 1550.0;
      m.length_km = length;
      m.direction = d;
      m.power_in_mw = 2.5;
      m.scattered_mw = beta * 0.8 * m.power_in_mw * raman_geometry_km(link, length, d);
      ms.push_back(m);
    }
  }
  const RamanProfile fit = fit_raman_coefficient(ms, link, 0.8, 1531.1157196);
  REQUIRE(fit.entries.size() == 1);
  CHECK(fit.entries[0].beta_per_km_nm == doctest::Approx(beta).epsilon(1e-12));
  CHECK(fit.entries[0].quantum_nm == doctest::Approx(1531.1157196));

  CHECK_THROWS_AS(fit_raman_coefficient({}, link, 0.8, 1531.0), std::invalid_argument);
}

TEST_CASE("budget assembles all sources at both references") {
  CoexistScenario s = single_channel_scenario(34, Direction::Forward, 0.0);
  const NoiseBudget at_alice = total_noise_budget(s, NoiseRef::AtAlice);
  CHECK(at_alice.reference == NoiseRef::AtAlice);
  CHECK(at_alice.entries.size() == 11);
  CHECK(at_alice.value(NoiseSource::SasrsForward) ==
        doctest::Approx(5.072100784e-3).epsilon(1e-8));
  CHECK(at_alice.value(NoiseSource::SasrsBackward) == doctest::Approx(0.0));
  CHECK(at_alice.value(NoiseSource::System) == doctest::Approx(0.03));
  CHECK(at_alice.total == doctest::Approx(0.03507222022).epsilon(1e-8));

  // entries sum to the total
  double sum = 0.0;
  for (const NoiseBudget::Entry& e : at_alice.entries) sum += e.xi;
  CHECK(sum == doctest::Approx(at_alice.total).epsilon(1e-12));

  // at-Bob form scales by the channel transmission
  const NoiseBudget at_bob = total_noise_budget(s, NoiseRef::AtBob);
  const double t = channel_transmission(s.link, s.mux);
  CHECK(at_bob.total == doctest::Approx(at_alice.total * t).epsilon(1e-10));

  // convert_reference round trips
  const NoiseBudget back = convert_reference(at_bob, s, NoiseRef::AtAlice);
  CHECK(back.total == doctest::Approx(at_alice.total).epsilon(1e-12));
  for (std::size_t i = 0; i < back.entries.size(); ++i) {
    CHECK(back.entries[i].xi ==
          doctest::Approx(at_alice.entries[i].xi).epsilon(1e-12));
  }
}

TEST_CASE("budget of the empty scenario is the system noise") {
  CoexistScenario s;
  const NoiseBudget budget = total_noise_budget(s, NoiseRef::AtAlice);
  CHECK(budget.total == doctest::Approx(0.03).epsilon(1e-12));
  for (const NoiseBudget::Entry& e : budget.entries) {
    if (e.source != NoiseSource::System) CHECK(e.xi == doctest::Approx(0.0));
  }
}

TEST_CASE("budget skips counter-propagating fwm pairs") {
  CoexistScenario s;
  s.channels.push_back(make_channel(56, Direction::Forward, 0.0));
  s.channels.push_back(make_channel(54, Direction::Backward, 0.0));
  CHECK(total_noise_budget(s, NoiseRef::AtBob).value(NoiseSource::Fwm) ==
        doctest::Approx(0.0));

  CoexistScenario both;
  both.channels.push_back(make_channel(56, Direction::Forward, 0.0));
  both.channels.push_back(make_channel(54, Direction::Forward, 0.0));
  CHECK(total_noise_budget(both, NoiseRef::AtBob).value(NoiseSource::Fwm) ==
        doctest::Approx(6e-4).epsilon(1e-7));
}

TEST_CASE("budget raman uses the profile beta at the pump wavelength") {
  CoexistScenario s = single_channel_scenario(34, Direction::Forward, 0.0);
  s.raman = RamanProfile::from_csv(QKD_DATA_DIR "/raman_sloped.csv");
  const double beta_at_pump = s.raman.beta(itu_channel(34).wavelength_nm);
  const NoiseBudget b = total_noise_budget(s, NoiseRef::AtAlice);
  CHECK(b.value(NoiseSource::SasrsForward) ==
        doctest::Approx(5.072100784e-3 * beta_at_pump / 3e-9).epsilon(1e-8));
}

TEST_CASE("validate flags structural problems") {
  CoexistScenario ok = single_channel_scenario(34, Direction::Forward, 0.0);
  CHECK(validate(ok).empty());

  CoexistScenario blue = single_channel_scenario(59, Direction::Forward, 0.0);
  CHECK_FALSE(validate(blue).empty());

  CoexistScenario collide = single_channel_scenario(58, Direction::Forward, 0.0);
  CHECK_THROWS_AS(validate(collide), std::invalid_argument);

  CoexistScenario duplicate = single_channel_scenario(34, Direction::Forward, 0.0);
  duplicate.channels.push_back(make_channel(34, Direction::Forward, 3.0));
  CHECK_THROWS_AS(validate(duplicate), std::invalid_argument);
}

TEST_CASE("calibration constants are exposed") {
  const auto constants = calibration_constants();
  REQUIRE(constants.size() == 6);
  bool found = false;
  for (const auto& [name, value] : constants) {
    if (name == "kappa_unmatched_leakage") {
      found = true;
      CHECK(value == doctest::Approx(7.7843072e-2).epsilon(1e-9));
    }
    CHECK(value > 0.0);
  }
  CHECK(found);
}

TEST_SUITE_END();
