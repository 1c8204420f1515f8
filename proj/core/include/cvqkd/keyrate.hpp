#pragma once

#include "cvqkd/system.hpp"

namespace cvqkd {

struct KeyRateResult {
  double mutual_info_bits = 0.0;
  double holevo_bits = 0.0;
  double key_bits_per_pulse = 0.0;
  double key_bits_per_second = 0.0;
  bool positive = false;
};

// Reverse-reconciliation GMCS homodyne key rate under collective attacks with
// trusted detector efficiency and electronic noise. T is the full channel
// transmission (add stage + fiber + drop stage); xi_in is the input-referred
// excess noise.
KeyRateResult secret_key_rate(const CvqkdSystem& system, double transmission,
                              double xi_input);

struct NullKeyThreshold {
  double xi = 0.0;     // maximum tolerable input-referred excess noise
  bool feasible = false;  // key rate positive at xi = 0
};

NullKeyThreshold null_key_threshold(const CvqkdSystem& system, double transmission);

// Asymptotic standard deviation of the input-referred excess-noise estimator
// over n signal samples, shot-noise reference pooled (tracked across the
// session, so its statistical error is excluded).
double xi_estimator_sigma(const CvqkdSystem& system, double transmission,
                          double xi_input, double n_samples);

// Same, with an n_shot-sample shot-noise reference included.
double xi_estimator_sigma_full(const CvqkdSystem& system, double transmission,
                               double xi_input, double n_signal, double n_shot);

// xi_hat plus `sigmas` estimator standard deviations.
double worst_case_xi(double xi_hat, double n_samples, const CvqkdSystem& system,
                     double transmission, double sigmas = 3.0);

struct VaOptimum {
  double v_a = 0.0;
  double key_bits_per_pulse = 0.0;
  bool feasible = false;  // some grid point had a positive rate
};

// Grid argmax of the key rate over the modulation variance; ties break toward
// smaller v_a.
VaOptimum optimize_va(const CvqkdSystem& system, double transmission, double xi_input,
                      double grid_lo = 0.5, double grid_hi = 20.0, double grid_step = 0.05);

}  // namespace cvqkd
