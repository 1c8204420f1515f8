#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cvqkd/system.hpp"
#include "cvqkd/units.hpp"

namespace cvqkd {

enum class Direction { Forward, Backward };
enum class Modulation { Continuous, OnOffKeying };

const char* to_string(Direction d);
const char* to_string(Modulation m);

struct WdmChannel {
  ItuChannel itu;
  Direction direction = Direction::Forward;
  double launch_power_dbm = 0.0;  // in-fiber power, measured after the add stage
  Modulation modulation = Modulation::Continuous;
  double ook_rate_hz = 0.0;

  double power_mw() const;
};

struct MuxSpec {
  double adjacent_isolation_db = -40.0;
  double nonadjacent_isolation_db = -80.0;
  double insertion_loss_db = 0.0;      // mux/demux stage, per side
  double adm_insertion_loss_db = 0.5;  // add/drop module, per side
  double channel_spacing_ghz = 100.0;

  // One-side transmission of the add or drop stage (mux + ADM).
  double side_efficiency() const;
  // Isolation applied to a classical channel `index_gap` grid slots away.
  double isolation_db(int index_gap) const;
};

void validate(const MuxSpec& mux);

// Raman scattering coefficient vs pump wavelength, piecewise-linear with
// nearest-value extension outside the tabulated range.
struct RamanProfile {
  struct Entry {
    double pump_nm = 0.0;
    double quantum_nm = 0.0;
    double beta_per_km_nm = 0.0;
  };
  std::vector<Entry> entries;  // strictly increasing pump_nm

  double beta(double pump_nm) const;

  static RamanProfile flat(double beta_per_km_nm = 3e-9);
  static RamanProfile from_csv(const std::string& path);
  void to_csv(const std::string& path) const;
};

void validate(const RamanProfile& profile);

// Direction-dependent pump geometry factor of the scattering integral, km.
// Forward: L*e^(-alpha*L); backward: (1 - e^(-2*alpha*L)) / (2*alpha).
double raman_geometry_km(const FiberLink& link, double length_km, Direction dir);

// Scattered photons per LO-matched spatio-temporal-polarization mode arriving
// at the receiver, including the drop-path efficiency eta_d.
double raman_matched_photons(const WdmChannel& channel, const FiberLink& link,
                             const RamanProfile& profile, double eta_d,
                             double quantum_wavelength_nm);

// Chaotic matched noise of mean photon number n seen by a detector of
// efficiency eta_b, as excess noise at the detector.
double matched_noise_to_excess(double n_matched, double eta_b);

// Refer output excess noise back to the channel input.
double excess_to_input_referred(double xi_out, double eta_d, double transmission);

// Photons of energy h*nu(quantum_wavelength) in one LO temporal slot at the
// given power.
double photons_per_slot(double power_mw, double quantum_wavelength_nm, double pulse_ns);

// Unmatched photons leaking through finite mux isolation. AtBob.
double leakage_noise(const std::vector<WdmChannel>& channels, const MuxSpec& mux,
                     const CvqkdSystem& system);

// Degenerate four-wave-mixing product 2*f1 - f2 landing on the quantum
// channel. Zero unless the frequency condition holds exactly on the grid.
// AtBob.
double fwm_noise(const WdmChannel& pump1, const WdmChannel& pump2,
                 const FiberLink& link, const ItuChannel& quantum,
                 const MuxSpec& mux, const CvqkdSystem& system);

// Amplified-spontaneous-emission photons surviving the quantum-channel
// bandpass. AtBob.
double ase_noise(double gain, double n_sp, const MuxSpec& mux,
                 const CvqkdSystem& system);

// Modulation sidebands of a classical carrier falling on the quantum
// wavelength. AtBob.
double sideband_noise(const WdmChannel& channel, const MuxSpec& mux,
                      const FiberLink& link, const CvqkdSystem& system,
                      double suppression_db = -40.0);

enum class XpmOverlap { None, Uniform, WorstCase };

// Cross-phase-modulation dephasing of the LO/signal by an intensity-modulated
// classical channel. AtBob. Continuous carriers contribute zero.
double xpm_noise(const WdmChannel& channel, const FiberLink& link,
                 const CvqkdSystem& system, XpmOverlap overlap = XpmOverlap::WorstCase);

enum class NoiseSource {
  SasrsForward,
  SasrsBackward,
  Leakage,
  Fwm,
  Ase,
  Sideband,
  Xpm,
  Rayleigh,
  Sbs,
  Gawbs,
  System,
};

const char* to_string(NoiseSource s);

struct NoiseBudget {
  struct Entry {
    NoiseSource source;
    double xi = 0.0;  // N_0 at `reference`
    std::string note;
  };
  std::vector<Entry> entries;  // fixed source order
  NoiseRef reference = NoiseRef::AtAlice;
  double total = 0.0;

  double value(NoiseSource s) const;
};

struct Amplifier {
  double gain = 1.0;  // no amplifier by default
  double n_sp = 1.5;
};

struct CoexistScenario {
  CvqkdSystem system;
  FiberLink link;
  MuxSpec mux;
  RamanProfile raman = RamanProfile::flat();
  std::vector<WdmChannel> channels;
  Amplifier amplifier;
};

// Validates structural invariants; returns human-readable warnings for
// configurations that are legal but outside the model's preferred regime
// (e.g. a classical channel blue of the quantum channel).
std::vector<std::string> validate(const CoexistScenario& scenario);

// Full channel transmission Alice to Bob: add stage, fiber, drop stage.
double channel_transmission(const FiberLink& link, const MuxSpec& mux);

NoiseBudget total_noise_budget(const CoexistScenario& scenario, NoiseRef reference);

// Converts a budget between reference points using the scenario's add/drop
// efficiencies and fiber transmission.
NoiseBudget convert_reference(const NoiseBudget& budget, const CoexistScenario& scenario,
                              NoiseRef target);

struct RamanMeasurement {
  double pump_nm = 0.0;
  double length_km = 0.0;
  Direction direction = Direction::Forward;
  double power_in_mw = 0.0;
  double scattered_mw = 0.0;  // backscatter/forward-scatter power in the band
};

// Inverts the power form of the scattering model per pump wavelength, least
// squares over measurements sharing a wavelength.
RamanProfile fit_raman_coefficient(const std::vector<RamanMeasurement>& measurements,
                                   const FiberLink& link, double band_nm = 0.8,
                                   double quantum_wavelength_nm = 1531.1157196);

// Anchored calibration constants of the leakage/FWM/ASE/sideband/XPM models,
// for echoing into output metadata.
std::vector<std::pair<std::string, double>> calibration_constants();

}  // namespace cvqkd
