#include "cvqkd/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvqkd {
namespace {

CoexistScenario base_scenario(const CvqkdSystem& system, const FiberLink& link,
                              const MuxSpec& mux, const RamanProfile& profile) {
  CoexistScenario s;
  s.system = system;
  s.link = link;
  s.mux = mux;
  s.raman = profile;
  return s;
}

// Candidate placement unit: a paired fwd+bwd channel at one index, or a
// single direction.
struct Unit {
  int index = 0;
  bool has_forward = false;
  bool has_backward = false;
};

std::vector<WdmChannel> unit_channels(const Unit& u, double fwd_dbm, double bwd_dbm) {
  std::vector<WdmChannel> out;
  if (u.has_forward) {
    out.push_back({itu_channel(u.index), Direction::Forward, fwd_dbm});
  }
  if (u.has_backward) {
    out.push_back({itu_channel(u.index), Direction::Backward, bwd_dbm});
  }
  return out;
}

bool better(const AllocationRequest& req, int quantum_index, double marginal, int index,
            double best_marginal, int best_index) {
  const double scale = std::max({1.0, std::abs(marginal), std::abs(best_marginal)});
  const bool tie = std::abs(marginal - best_marginal) <= 1e-12 * scale;
  if (!tie) {
    return req.objective == AllocObjective::MinNoise ? marginal < best_marginal
                                                     : marginal > best_marginal;
  }
  const int dist = std::abs(index - quantum_index);
  const int best_dist = std::abs(best_index - quantum_index);
  if (dist != best_dist) {
    return dist > best_dist;
  }
  return index < best_index;
}

}  // namespace

const char* to_string(AllocObjective o) {
  return o == AllocObjective::MinNoise ? "min_noise" : "max_noise";
}

std::vector<int> default_candidates(const ItuChannel& quantum) {
  std::vector<int> out;
  // Walk the grid outward until the wavelength leaves the C band.
  for (int index = -1000; index <= 1000; ++index) {
    if (index == quantum.index) {
      continue;
    }
    try {
      itu_channel(index);
    } catch (const std::out_of_range&) {
      continue;
    }
    out.push_back(index);
  }
  return out;
}

AllocationResult allocate(const AllocationRequest& request) {
  if (request.candidate_indices.empty()) {
    throw std::invalid_argument("allocate: empty candidate list");
  }
  if (request.mode.kind == AllocationMode::Kind::FixedPairs && request.mode.fixed_pairs < 0) {
    throw std::invalid_argument("allocate: fixed pair count must be >= 0");
  }
  const int quantum_index = request.system.quantum_channel.index;
  std::vector<int> candidates = request.candidate_indices;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (int index : candidates) {
    if (index == quantum_index) {
      throw std::invalid_argument("allocate: candidate collides with the quantum channel");
    }
    itu_channel(index);  // rejects off-grid candidates
  }

  CoexistScenario current =
      base_scenario(request.system, request.link, request.mux, request.profile);
  const ScenarioKeyRate baseline = scenario_key_rate(current, request.finite_size);

  AllocationResult result;
  result.baseline_feasible = baseline.feasible;
  result.key_rate_final = baseline.key;
  result.xi_final = baseline.xi_total;
  if (!baseline.feasible) {
    result.feasible = false;
    return result;
  }

  std::vector<Unit> remaining;
  for (int index : candidates) {
    Unit u;
    u.index = index;
    u.has_forward = true;
    u.has_backward = request.paired;
    remaining.push_back(u);
  }
  if (!request.paired) {
    // Independent single-direction placement: one forward and one backward
    // unit per candidate index.
    std::vector<Unit> split;
    for (const Unit& u : remaining) {
      split.push_back({u.index, true, false});
      split.push_back({u.index, false, true});
    }
    remaining = split;
  }

  double current_total = baseline.xi_total;
  ScenarioKeyRate last_feasible = baseline;
  while (!remaining.empty()) {
    if (request.mode.kind == AllocationMode::Kind::FixedPairs &&
        result.pairs_placed >= request.mode.fixed_pairs) {
      break;
    }
    std::size_t best_pos = 0;
    double best_marginal = 0.0;
    bool have_best = false;
    std::vector<ScenarioKeyRate> trials(remaining.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      CoexistScenario trial = current;
      for (const WdmChannel& ch : unit_channels(remaining[i], request.forward_power_dbm,
                                                request.backward_power_dbm)) {
        trial.channels.push_back(ch);
      }
      trials[i] = scenario_key_rate(trial, request.finite_size);
      const double marginal = trials[i].xi_total - current_total;
      if (!have_best || better(request, quantum_index, marginal, remaining[i].index,
                               best_marginal, remaining[best_pos].index)) {
        have_best = true;
        best_pos = i;
        best_marginal = marginal;
      }
    }
    const ScenarioKeyRate& best_trial = trials[best_pos];
    if (request.mode.kind == AllocationMode::Kind::MaxPairs && !best_trial.feasible) {
      break;
    }

    // Record per-channel marginals sequentially within the unit.
    for (const WdmChannel& ch : unit_channels(remaining[best_pos],
                                              request.forward_power_dbm,
                                              request.backward_power_dbm)) {
      current.channels.push_back(ch);
      const ScenarioKeyRate step = scenario_key_rate(current, request.finite_size);
      AllocationResult::Placed placed;
      placed.itu = ch.itu;
      placed.direction = ch.direction;
      placed.marginal_xi = step.xi_total - current_total;
      placed.cumulative_xi = step.xi_total;
      current_total = step.xi_total;
      result.chosen.push_back(placed);
    }
    last_feasible = best_trial;
    result.pairs_placed += 1;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
  }

  result.key_rate_final = last_feasible.key;
  result.xi_final = current_total;
  result.feasible = last_feasible.feasible;
  return result;
}

namespace {

CoexistScenario envelope_scenario(double distance_km, Direction direction,
                                  const CvqkdSystem& system, const FiberLink& link,
                                  const MuxSpec& mux, const RamanProfile& profile,
                                  double power_dbm) {
  CoexistScenario s = base_scenario(system, link, mux, profile);
  s.link.length_km = distance_km;
  s.channels.push_back({itu_channel(34), direction, power_dbm});
  return s;
}

bool envelope_feasible(double distance_km, Direction direction, const CvqkdSystem& system,
                       const FiberLink& link, const MuxSpec& mux,
                       const RamanProfile& profile, double power_mw,
                       const FiniteSizePolicy& policy) {
  if (power_mw <= 0.0) {
    CoexistScenario s = base_scenario(system, link, mux, profile);
    s.link.length_km = distance_km;
    return scenario_key_rate(s, policy).feasible;
  }
  const CoexistScenario s = envelope_scenario(distance_km, direction, system, link, mux,
                                              profile, mw_to_dbm(power_mw));
  return scenario_key_rate(s, policy).feasible;
}

}  // namespace

PowerEnvelope max_tolerable_power(double distance_km, Direction direction,
                                  const CvqkdSystem& system, const FiberLink& link,
                                  const MuxSpec& mux, const RamanProfile& profile,
                                  const FiniteSizePolicy& policy) {
  if (!(distance_km > 0.0)) {
    throw std::invalid_argument("max_tolerable_power: distance must be > 0");
  }
  PowerEnvelope out;
  const auto feasible = [&](double power_mw) {
    return envelope_feasible(distance_km, direction, system, link, mux, profile,
                             power_mw, policy);
  };
  if (!feasible(0.0)) {
    out.feasible = false;
    out.power_mw = 0.0;
    return out;
  }
  out.feasible = true;
  double lo = 0.0;
  double hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) {
      out.power_mw = lo;
      return out;  // beyond any physical launch power
    }
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  out.power_mw = lo;
  return out;
}

DistanceResult reachable_distance(double power_dbm, Direction direction,
                                  const CvqkdSystem& system, const FiberLink& link,
                                  const MuxSpec& mux, const RamanProfile& profile,
                                  const FiniteSizePolicy& policy) {
  if (!std::isfinite(power_dbm)) {
    throw std::invalid_argument("reachable_distance: power must be finite");
  }
  const double power_mw = dbm_to_mw(power_dbm);
  const auto feasible = [&](double distance_km) {
    return envelope_feasible(distance_km, direction, system, link, mux, profile,
                             power_mw, policy);
  };
  DistanceResult out;
  double lo = 1e-3;
  if (!feasible(lo)) {
    out.distance_km = 0.0;
    out.feasible = false;
    return out;
  }
  out.feasible = true;
  double hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) {
      out.distance_km = lo;
      return out;
    }
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  out.distance_km = lo;
  return out;
}

}  // namespace cvqkd
