#include "cvqkd/scenario.hpp"

#include <stdexcept>

namespace cvqkd {

ScenarioKeyRate scenario_key_rate(const CoexistScenario& scenario,
                                  const FiniteSizePolicy& policy) {
  if (!(policy.n_samples > 100.0)) {
    throw std::invalid_argument("scenario_key_rate: finite-size sample count must exceed 100");
  }
  if (!(policy.duty > 0.0 && policy.duty <= 1.0)) {
    throw std::invalid_argument("scenario_key_rate: duty outside (0, 1]");
  }
  ScenarioKeyRate out;
  out.budget = total_noise_budget(scenario, NoiseRef::AtAlice);
  out.xi_total = out.budget.total;
  const double t_channel = channel_transmission(scenario.link, scenario.mux);
  out.xi_worst_case = worst_case_xi(out.xi_total, policy.n_samples, scenario.system,
                                    t_channel, policy.sigmas);
  out.threshold = null_key_threshold(scenario.system, t_channel);
  out.key = secret_key_rate(scenario.system, t_channel, out.xi_worst_case);
  out.duty_factor = policy.duty;
  out.key_bits_per_second_scheduled = out.key.key_bits_per_second * policy.duty;
  out.feasible = out.key.positive;
  return out;
}

}  // namespace cvqkd
