#include "cvqkd/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cvqkd {
namespace {

// Matched-fraction calibration constants. Each is a single-point anchor: the
// value makes the named canonical configuration reproduce its measured
// excess-noise level exactly; the surrounding power/isolation scaling comes
// from the model.
//
// Unmatched leakage, anchored at: 0 dBm channel, -80 dB isolation -> 6e-9 N_0
// (equivalently -40 dB -> 6e-5, same constant).
constexpr double kUnmatchedMatchFraction = 7.7843072e-2;
// Degenerate FWM product, anchored at: two 0 dBm pumps 100 GHz apart with the
// product on the quantum channel -> -81 dBm product power and 6e-4 N_0.
constexpr double kFwmMatchFraction = 9.7998622e-5;
constexpr double kFwmConversionPerMw2 = 7.9432823472e-9;  // 10^(-8.1) mW per mW^3
// Carrier sidebands, anchored at: 0 dBm adjacent channel, -40 dB suppression,
// -40 dB isolation, 25 km -> 2.4e-4 N_0.
constexpr double kSidebandMatchFraction = 9.8464563e-5;
// Post-demux ASE, anchored at: G = 100, n_sp = 1.5 -> 6e-7 N_0.
constexpr double kAseFilterFraction = 2.0202020e-9;
// XPM dephasing, anchored at: 0 dBm OOK channel, 25 km -> 1.3e-5 N_0 with the
// worst-case pulse-overlap variance phi_max^2/4.
constexpr double kXpmMatchFraction = 7.8492139e-3;

double photon_energy_j(double wavelength_nm) {
  return kPlanckJs * (kSpeedOfLightNmThz / wavelength_nm) * 1e12;
}

void require(bool ok, const char* message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

}  // namespace

const char* to_string(Direction d) {
  return d == Direction::Forward ? "forward" : "backward";
}

const char* to_string(Modulation m) {
  return m == Modulation::Continuous ? "continuous" : "ook";
}

const char* to_string(NoiseSource s) {
  switch (s) {
    case NoiseSource::SasrsForward: return "sasrs_fwd";
    case NoiseSource::SasrsBackward: return "sasrs_bwd";
    case NoiseSource::Leakage: return "leakage";
    case NoiseSource::Fwm: return "fwm";
    case NoiseSource::Ase: return "ase";
    case NoiseSource::Sideband: return "sideband";
    case NoiseSource::Xpm: return "xpm";
    case NoiseSource::Rayleigh: return "rayleigh";
    case NoiseSource::Sbs: return "sbs";
    case NoiseSource::Gawbs: return "gawbs";
    case NoiseSource::System: return "system";
  }
  return "unknown";
}

double WdmChannel::power_mw() const { return dbm_to_mw(launch_power_dbm); }

double MuxSpec::side_efficiency() const {
  return std::pow(10.0, -(insertion_loss_db + adm_insertion_loss_db) / 10.0);
}

double MuxSpec::isolation_db(int index_gap) const {
  return std::abs(index_gap) <= 1 ? adjacent_isolation_db : nonadjacent_isolation_db;
}

void validate(const MuxSpec& mux) {
  require(mux.adjacent_isolation_db < 0.0, "mux: adjacent isolation must be < 0 dB");
  require(mux.nonadjacent_isolation_db < 0.0, "mux: non-adjacent isolation must be < 0 dB");
  require(mux.insertion_loss_db >= 0.0, "mux: insertion loss must be >= 0 dB");
  require(mux.adm_insertion_loss_db >= 0.0, "mux: ADM insertion loss must be >= 0 dB");
  require(mux.channel_spacing_ghz > 0.0, "mux: channel spacing must be > 0");
}

double RamanProfile::beta(double pump_nm) const {
  if (entries.empty()) {
    throw std::invalid_argument("RamanProfile: empty profile");
  }
  if (pump_nm <= entries.front().pump_nm) {
    return entries.front().beta_per_km_nm;
  }
  if (pump_nm >= entries.back().pump_nm) {
    return entries.back().beta_per_km_nm;
  }
  auto hi = std::lower_bound(entries.begin(), entries.end(), pump_nm,
                             [](const Entry& e, double x) { return e.pump_nm < x; });
  auto lo = hi - 1;
  const double t = (pump_nm - lo->pump_nm) / (hi->pump_nm - lo->pump_nm);
  return lo->beta_per_km_nm + t * (hi->beta_per_km_nm - lo->beta_per_km_nm);
}

RamanProfile RamanProfile::flat(double beta_per_km_nm) {
  RamanProfile p;
  p.entries = {{kCBandMinNm, 1531.1157196, beta_per_km_nm},
               {kCBandMaxNm, 1531.1157196, beta_per_km_nm}};
  return p;
}

RamanProfile RamanProfile::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("RamanProfile: cannot open " + path);
  }
  RamanProfile profile;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (!header_seen) {
      if (line != "pump_nm,quantum_nm,beta_per_km_nm") {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected header pump_nm,quantum_nm,beta_per_km_nm");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    Entry e;
    char c1 = 0, c2 = 0;
    if (!(row >> e.pump_nm >> c1 >> e.quantum_nm >> c2 >> e.beta_per_km_nm) ||
        c1 != ',' || c2 != ',') {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
    }
    profile.entries.push_back(e);
  }
  validate(profile);
  return profile;
}

void RamanProfile::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("RamanProfile: cannot write " + path);
  }
  out << "pump_nm,quantum_nm,beta_per_km_nm\n";
  out.precision(10);
  for (const Entry& e : entries) {
    out << e.pump_nm << ',' << e.quantum_nm << ',' << e.beta_per_km_nm << '\n';
  }
}

void validate(const RamanProfile& profile) {
  require(!profile.entries.empty(), "RamanProfile: needs at least one entry");
  for (std::size_t i = 0; i < profile.entries.size(); ++i) {
    const auto& e = profile.entries[i];
    require(e.beta_per_km_nm >= 0.0 && e.beta_per_km_nm <= 1e-6,
            "RamanProfile: beta outside [0, 1e-6] per km*nm");
    require(e.pump_nm > 0.0, "RamanProfile: pump wavelength must be > 0");
    if (i > 0) {
      require(profile.entries[i - 1].pump_nm < e.pump_nm,
              "RamanProfile: pump wavelengths must be strictly increasing");
    }
  }
}

double raman_geometry_km(const FiberLink& link, double length_km, Direction dir) {
  require(length_km >= 0.0, "raman_geometry_km: negative length");
  const double alpha = link.alpha_lin_per_km();
  if (dir == Direction::Forward) {
    return length_km * std::exp(-alpha * length_km);
  }
  if (alpha <= 0.0) {
    return length_km;
  }
  return (1.0 - std::exp(-2.0 * alpha * length_km)) / (2.0 * alpha);
}

double raman_matched_photons(const WdmChannel& channel, const FiberLink& link,
                             const RamanProfile& profile, double eta_d,
                             double quantum_wavelength_nm) {
  require(eta_d > 0.0 && eta_d <= 1.0, "raman_matched_photons: eta_d outside (0, 1]");
  require(link.length_km > 0.0, "raman_matched_photons: link length must be > 0");
  const double beta = profile.beta(channel.itu.wavelength_nm);
  const double lambda_m = quantum_wavelength_nm * 1e-9;
  const double prefactor = lambda_m * lambda_m * lambda_m /
                           (kPlanckJs * kSpeedOfLightMPerS * kSpeedOfLightMPerS);
  const double beta_si_per_m2 = beta * 1e6;
  const double power_w = channel.power_mw() * 1e-3;
  const double geometry_m = raman_geometry_km(link, link.length_km, channel.direction) * 1e3;
  return 0.5 * prefactor * beta_si_per_m2 * power_w * geometry_m * eta_d;
}

double matched_noise_to_excess(double n_matched, double eta_b) {
  require(n_matched >= 0.0, "matched_noise_to_excess: negative photon number");
  require(eta_b > 0.0 && eta_b <= 1.0, "matched_noise_to_excess: eta_b outside (0, 1]");
  return 2.0 * eta_b * n_matched;
}

double excess_to_input_referred(double xi_out, double eta_d, double transmission) {
  require(eta_d > 0.0 && eta_d <= 1.0, "excess_to_input_referred: eta_d outside (0, 1]");
  require(transmission > 0.0 && transmission <= 1.0,
          "excess_to_input_referred: transmission outside (0, 1]");
  return xi_out / (eta_d * transmission);
}

double photons_per_slot(double power_mw, double quantum_wavelength_nm, double pulse_ns) {
  require(power_mw >= 0.0, "photons_per_slot: negative power");
  require(pulse_ns > 0.0, "photons_per_slot: pulse duration must be > 0");
  return power_mw * 1e-3 * pulse_ns * 1e-9 / photon_energy_j(quantum_wavelength_nm);
}

double leakage_noise(const std::vector<WdmChannel>& channels, const MuxSpec& mux,
                     const CvqkdSystem& system) {
  require(system.lo_photons > 0.0, "leakage_noise: LO photon number must be > 0");
  double xi = 0.0;
  for (const WdmChannel& ch : channels) {
    const int gap = ch.itu.index - system.quantum_channel.index;
    const double leaked_mw =
        ch.power_mw() * std::pow(10.0, mux.isolation_db(gap) / 10.0);
    const double n_slot = photons_per_slot(leaked_mw, system.quantum_channel.wavelength_nm,
                                           system.pulse_ns);
    xi += kUnmatchedMatchFraction * 2.0 * n_slot / system.lo_photons;
  }
  return xi;
}

double fwm_noise(const WdmChannel& pump1, const WdmChannel& pump2,
                 const FiberLink& link, const ItuChannel& quantum,
                 const MuxSpec& mux, const CvqkdSystem& system) {
  (void)link;
  (void)mux;
  if (pump1.itu.index == pump2.itu.index) {
    throw std::invalid_argument("fwm_noise: pumps at identical wavelength");
  }
  double xi = 0.0;
  const WdmChannel* pumps[2][2] = {{&pump1, &pump2}, {&pump2, &pump1}};
  for (const auto& pair : pumps) {
    const WdmChannel& a = *pair[0];
    const WdmChannel& b = *pair[1];
    if (2 * a.itu.index - b.itu.index != quantum.index) {
      continue;
    }
    const double product_mw =
        kFwmConversionPerMw2 * a.power_mw() * a.power_mw() * b.power_mw();
    const double n_slot =
        photons_per_slot(product_mw, quantum.wavelength_nm, system.pulse_ns);
    xi += 2.0 * kFwmMatchFraction * n_slot;
  }
  return xi;
}

double ase_noise(double gain, double n_sp, const MuxSpec& mux,
                 const CvqkdSystem& system) {
  (void)mux;
  require(gain >= 1.0, "ase_noise: gain must be >= 1");
  require(n_sp >= 1.0, "ase_noise: n_sp must be >= 1");
  const double n_matched = n_sp * (gain - 1.0) * kAseFilterFraction;
  (void)system;
  return 2.0 * n_matched;
}

double sideband_noise(const WdmChannel& channel, const MuxSpec& mux,
                      const FiberLink& link, const CvqkdSystem& system,
                      double suppression_db) {
  require(suppression_db < 0.0, "sideband_noise: suppression must be < 0 dB");
  const int gap = channel.itu.index - system.quantum_channel.index;
  const double power_at_bob_mw = channel.power_mw() *
                                 std::pow(10.0, suppression_db / 10.0) *
                                 std::pow(10.0, mux.isolation_db(gap) / 10.0) *
                                 fiber_transmission(link, link.length_km);
  const double n_slot = photons_per_slot(power_at_bob_mw,
                                         system.quantum_channel.wavelength_nm,
                                         system.pulse_ns);
  return 2.0 * kSidebandMatchFraction * n_slot;
}

double xpm_noise(const WdmChannel& channel, const FiberLink& link,
                 const CvqkdSystem& system, XpmOverlap overlap) {
  if (channel.modulation != Modulation::OnOffKeying || overlap == XpmOverlap::None) {
    return 0.0;
  }
  // Worst-case intensity swing: full extinction between OOK levels.
  const double delta_p_mw = channel.power_mw();
  const double l_eff_m = effective_length_km(link, link.length_km) * 1e3;
  const double lambda_c_m = channel.itu.wavelength_nm * 1e-9;
  const double a_eff_m2 = link.a_eff_um2 * 1e-12;
  const double phi_max =
      4.0 * 3.14159265358979323846 * link.n2_m2_per_mw * l_eff_m * delta_p_mw /
      (lambda_c_m * a_eff_m2);
  const double var_phi = overlap == XpmOverlap::WorstCase ? phi_max * phi_max / 4.0
                                                          : phi_max * phi_max / 12.0;
  return system.v_a * kXpmMatchFraction * var_phi;
}

double NoiseBudget::value(NoiseSource s) const {
  for (const Entry& e : entries) {
    if (e.source == s) {
      return e.xi;
    }
  }
  throw std::invalid_argument("NoiseBudget: missing source");
}

double channel_transmission(const FiberLink& link, const MuxSpec& mux) {
  const double side = mux.side_efficiency();
  return side * fiber_transmission(link, link.length_km) * side;
}

std::vector<std::string> validate(const CoexistScenario& s) {
  const CvqkdSystem& sys = s.system;
  require(sys.v_a > 0.0, "system: v_a must be > 0");
  require(sys.eta_b > 0.0 && sys.eta_b <= 1.0, "system: eta_b outside (0, 1]");
  require(sys.beta_rec > 0.0 && sys.beta_rec <= 1.0, "system: beta_rec outside (0, 1]");
  require(sys.v_el >= 0.0, "system: v_el must be >= 0");
  require(sys.xi_system >= 0.0, "system: xi_system must be >= 0");
  require(sys.clock_hz > 0.0, "system: clock_hz must be > 0");
  require(sys.lo_photons > 0.0, "system: lo_photons must be > 0");
  require(sys.pulse_ns > 0.0, "system: pulse_ns must be > 0");
  require(s.link.length_km > 0.0, "link: length must be > 0");
  require(s.link.alpha_db_per_km >= 0.0, "link: alpha must be >= 0");
  require(s.link.a_eff_um2 > 0.0, "link: effective area must be > 0");
  require(s.link.n2_m2_per_mw >= 0.0, "link: n2 must be >= 0");
  validate(s.mux);
  validate(s.raman);
  require(s.amplifier.gain >= 1.0, "amplifier: gain must be >= 1");
  require(s.amplifier.n_sp >= 1.0, "amplifier: n_sp must be >= 1");

  std::vector<std::string> warnings;
  std::vector<std::pair<int, Direction>> seen;
  for (const WdmChannel& ch : s.channels) {
    require(std::isfinite(ch.launch_power_dbm), "channel: power must be finite");
    if (ch.itu.index == sys.quantum_channel.index) {
      throw std::invalid_argument("channel: ITU index collides with the quantum channel");
    }
    const auto key = std::make_pair(ch.itu.index, ch.direction);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw std::invalid_argument("channel: duplicate ITU index and direction");
    }
    seen.push_back(key);
    if (ch.itu.wavelength_nm < sys.quantum_channel.wavelength_nm) {
      warnings.push_back("channel " + std::to_string(ch.itu.index) +
                         " sits blue of the quantum channel; Stokes scattering into the "
                         "quantum band exceeds the anti-Stokes model used here");
    }
  }
  return warnings;
}

NoiseBudget total_noise_budget(const CoexistScenario& scenario, NoiseRef reference) {
  validate(scenario);
  const CvqkdSystem& sys = scenario.system;
  const double quantum_nm = sys.quantum_channel.wavelength_nm;
  const double eta_drop = scenario.mux.side_efficiency();
  const double t_channel = channel_transmission(scenario.link, scenario.mux);

  double sasrs_fwd = 0.0;
  double sasrs_bwd = 0.0;
  double sideband = 0.0;
  double xpm = 0.0;
  for (const WdmChannel& ch : scenario.channels) {
    const double n = raman_matched_photons(ch, scenario.link, scenario.raman, eta_drop,
                                           quantum_nm);
    const double xi = matched_noise_to_excess(n, 1.0);
    (ch.direction == Direction::Forward ? sasrs_fwd : sasrs_bwd) += xi;
    sideband += sideband_noise(ch, scenario.mux, scenario.link, sys);
    xpm += xpm_noise(ch, scenario.link, sys, XpmOverlap::WorstCase);
  }

  double fwm = 0.0;
  for (std::size_t i = 0; i < scenario.channels.size(); ++i) {
    for (std::size_t j = i + 1; j < scenario.channels.size(); ++j) {
      const WdmChannel& a = scenario.channels[i];
      const WdmChannel& b = scenario.channels[j];
      if (a.itu.index == b.itu.index || a.direction != b.direction) {
        continue;  // counter-propagating pumps do not phase-match
      }
      fwm += fwm_noise(a, b, scenario.link, sys.quantum_channel, scenario.mux, sys);
    }
  }

  const double leakage = leakage_noise(scenario.channels, scenario.mux, sys);
  const double ase = ase_noise(scenario.amplifier.gain, scenario.amplifier.n_sp,
                               scenario.mux, sys);

  // Entries are assembled at Bob (detector input), the system term at Alice.
  const double to_ref_bob = reference == NoiseRef::AtBob ? 1.0 : 1.0 / t_channel;
  const double to_ref_alice = reference == NoiseRef::AtBob ? t_channel : 1.0;

  NoiseBudget budget;
  budget.reference = reference;
  budget.entries = {
      {NoiseSource::SasrsForward, sasrs_fwd * to_ref_bob,
       "spontaneous anti-Stokes scattering of co-propagating channels"},
      {NoiseSource::SasrsBackward, sasrs_bwd * to_ref_bob,
       "spontaneous anti-Stokes scattering of counter-propagating channels"},
      {NoiseSource::Leakage, leakage * to_ref_bob,
       "unmatched photons through finite demux isolation"},
      {NoiseSource::Fwm, fwm * to_ref_bob,
       "degenerate four-wave-mixing products on the quantum channel"},
      {NoiseSource::Ase, ase * to_ref_bob,
       "amplifier spontaneous emission surviving the quantum bandpass"},
      {NoiseSource::Sideband, sideband * to_ref_bob,
       "classical modulation sidebands at the quantum wavelength"},
      {NoiseSource::Xpm, xpm * to_ref_bob,
       "cross-phase-modulation dephasing by intensity-modulated channels"},
      {NoiseSource::Rayleigh, 0.0,
       "elastic scattering stays at the pump wavelength and is rejected by the demux"},
      {NoiseSource::Sbs, 0.0,
       "launch powers sit below the Brillouin threshold of the configured link"},
      {NoiseSource::Gawbs, 0.0,
       "acoustic sidebands of the classical carriers are filtered out with the carriers"},
      {NoiseSource::System, sys.xi_system * to_ref_alice,
       "intrinsic transmitter/receiver excess noise, calibrated at the channel input"},
  };
  budget.total = 0.0;
  for (const auto& e : budget.entries) {
    budget.total += e.xi;
  }
  return budget;
}

NoiseBudget convert_reference(const NoiseBudget& budget, const CoexistScenario& scenario,
                              NoiseRef target) {
  if (budget.reference == target) {
    return budget;
  }
  const double t_channel = channel_transmission(scenario.link, scenario.mux);
  const double factor = target == NoiseRef::AtBob ? t_channel : 1.0 / t_channel;
  NoiseBudget out = budget;
  out.reference = target;
  out.total = 0.0;
  for (auto& e : out.entries) {
    e.xi *= factor;
    out.total += e.xi;
  }
  return out;
}

RamanProfile fit_raman_coefficient(const std::vector<RamanMeasurement>& measurements,
                                   const FiberLink& link, double band_nm,
                                   double quantum_wavelength_nm) {
  require(!measurements.empty(), "fit_raman_coefficient: no measurements");
  require(band_nm > 0.0, "fit_raman_coefficient: band must be > 0 nm");
  std::map<double, std::pair<double, double>> sums;  // pump_nm -> (sum xy, sum xx)
  for (const RamanMeasurement& m : measurements) {
    require(m.length_km > 0.0, "fit_raman_coefficient: zero-length geometry rejected");
    require(m.power_in_mw > 0.0, "fit_raman_coefficient: input power must be > 0");
    require(m.scattered_mw >= 0.0, "fit_raman_coefficient: negative scattered power");
    const double x =
        m.power_in_mw * band_nm * raman_geometry_km(link, m.length_km, m.direction);
    auto& acc = sums[m.pump_nm];
    acc.first += x * m.scattered_mw;
    acc.second += x * x;
  }
  RamanProfile profile;
  for (const auto& [pump_nm, acc] : sums) {
    profile.entries.push_back({pump_nm, quantum_wavelength_nm, acc.first / acc.second});
  }
  validate(profile);
  return profile;
}

std::vector<std::pair<std::string, double>> calibration_constants() {
  return {
      {"kappa_unmatched_leakage", kUnmatchedMatchFraction},
      {"kappa_fwm_matched", kFwmMatchFraction},
      {"fwm_conversion_per_mw2", kFwmConversionPerMw2},
      {"kappa_sideband_matched", kSidebandMatchFraction},
      {"kappa_ase_filter", kAseFilterFraction},
      {"kappa_xpm_matched", kXpmMatchFraction},
  };
}

}  // namespace cvqkd
