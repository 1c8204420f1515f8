#pragma once

#include "cvqkd/keyrate.hpp"
#include "cvqkd/noise.hpp"

namespace cvqkd {

// Worst-case treatment applied to scenario-level feasibility: the budget
// total is inflated by `sigmas` standard deviations of the excess-noise
// estimator at the experiment's block size, and reported throughput carries
// the calibration duty cycle (half the pulses measure shot noise under the
// alternating schedule).
struct FiniteSizePolicy {
  double n_samples = 1e8;
  double sigmas = 3.0;
  double duty = 0.5;
};

struct ScenarioKeyRate {
  NoiseBudget budget;             // at Alice
  double xi_total = 0.0;          // budget total, N_0 at Alice
  double xi_worst_case = 0.0;     // xi_total + sigmas * sigma(xi_hat)
  NullKeyThreshold threshold;     // at the scenario transmission
  KeyRateResult key;              // evaluated at xi_worst_case
  double duty_factor = 1.0;
  double key_bits_per_second_scheduled = 0.0;
  bool feasible = false;
};

ScenarioKeyRate scenario_key_rate(const CoexistScenario& scenario,
                                  const FiniteSizePolicy& policy = {});

}  // namespace cvqkd
