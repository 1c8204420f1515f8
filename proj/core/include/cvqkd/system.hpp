#pragma once

#include "cvqkd/units.hpp"

namespace cvqkd {

// GMCS CV-QKD transmitter/receiver parameters. Detector efficiency and
// electronic noise are trusted (calibrated), reconciliation runs in reverse.
struct CvqkdSystem {
  double v_a = 3.5;          // modulation variance, N_0
  double clock_hz = 1e6;     // symbol rate
  double lo_photons = 1e8;   // local oscillator photons per pulse
  double pulse_ns = 50.0;    // pulse (integration) window
  double eta_b = 0.6;        // homodyne detection efficiency
  double v_el = 0.01;        // electronic noise, N_0
  double beta_rec = 0.95;    // reconciliation efficiency
  double xi_system = 0.03;   // intrinsic excess noise at the channel input, N_0
  ItuChannel quantum_channel = itu_channel(58);

  double pulse_s() const { return pulse_ns * 1e-9; }
};

}  // namespace cvqkd
