#pragma once

#include <vector>

#include "cvqkd/scenario.hpp"

namespace cvqkd {

enum class AllocObjective { MinNoise, MaxNoise };

const char* to_string(AllocObjective o);

struct AllocationMode {
  enum class Kind { MaxPairs, FixedPairs };
  Kind kind = Kind::MaxPairs;
  int fixed_pairs = 0;

  static AllocationMode max_pairs() { return {}; }
  static AllocationMode fixed(int k) { return {Kind::FixedPairs, k}; }
};

struct AllocationRequest {
  CvqkdSystem system;
  FiberLink link;
  MuxSpec mux;
  RamanProfile profile = RamanProfile::flat();
  std::vector<int> candidate_indices;  // quantum index excluded
  double forward_power_dbm = 0.0;
  double backward_power_dbm = 0.0;
  AllocObjective objective = AllocObjective::MinNoise;
  AllocationMode mode;
  bool paired = true;  // place forward+backward atomically at one wavelength
  FiniteSizePolicy finite_size;
};

// All C-band grid indices except the quantum channel.
std::vector<int> default_candidates(const ItuChannel& quantum);

struct AllocationResult {
  struct Placed {
    ItuChannel itu;
    Direction direction;
    double marginal_xi = 0.0;    // budget increase from this channel, at Alice
    double cumulative_xi = 0.0;  // budget total after placing it
  };
  std::vector<Placed> chosen;  // placement order
  int pairs_placed = 0;
  bool baseline_feasible = false;  // system-noise-only key rate positive
  bool feasible = false;           // == key_rate_final.positive
  KeyRateResult key_rate_final;
  double xi_final = 0.0;  // budget total with all chosen channels, at Alice
};

// Greedy placement. Each step evaluates the marginal worst-case budget of
// every remaining candidate, picks per the objective, and stops when the best
// next step would kill the key (MaxPairs) or after k pairs (FixedPairs).
// Ties break toward larger spectral distance from the quantum channel, then
// the lower ITU index.
AllocationResult allocate(const AllocationRequest& request);

struct PowerEnvelope {
  double power_mw = 0.0;
  bool feasible = false;  // key rate positive as launch power -> 0
};

// Largest single-channel launch power (channel at ITU 34 in the given
// direction) keeping the worst-case key rate positive at this distance.
// Bisection to 1e-3 mW.
PowerEnvelope max_tolerable_power(double distance_km, Direction direction,
                                  const CvqkdSystem& system, const FiberLink& link,
                                  const MuxSpec& mux, const RamanProfile& profile,
                                  const FiniteSizePolicy& policy = {});

struct DistanceResult {
  double distance_km = 0.0;
  bool feasible = false;
};

// Largest distance with a positive worst-case key rate for a single classical
// channel at the given launch power; inverse of max_tolerable_power.
DistanceResult reachable_distance(double power_dbm, Direction direction,
                                  const CvqkdSystem& system, const FiberLink& link,
                                  const MuxSpec& mux, const RamanProfile& profile,
                                  const FiniteSizePolicy& policy = {});

}  // namespace cvqkd
