#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvqkd/allocator.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/scenario.hpp"

namespace cvqkd {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  enum class Axis { PowerMw, PowerDbm, DistanceKm };
  bool present = false;
  Axis axis = Axis::PowerMw;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;  // number of grid points, >= 2
};

const char* to_string(SweepSpec::Axis a);

struct EstimationSpec {
  bool present = false;
  AcquisitionConfig cfg;
};

struct AllocateSpec {
  bool present = false;
  // Candidate slots: every C-band grid index in [min, max] except the quantum
  // channel.
  int candidate_min_index = -1000;
  int candidate_max_index = 1000;
  double forward_power_dbm = 0.0;
  double backward_power_dbm = 0.0;
  AllocObjective objective = AllocObjective::MinNoise;
  AllocationMode mode;
  bool paired = true;
};

// A fully resolved run configuration: physical scenario plus optional
// command-specific sections.
struct ScenarioConfig {
  CoexistScenario scenario;
  FiniteSizePolicy finite_size;
  std::uint64_t seed = 1;
  std::string raman_profile_path;  // empty: bundled flat profile
  SweepSpec sweep;
  EstimationSpec estimation;
  AllocateSpec allocate;
};

// Expands the allocate section against the scenario into a runnable request.
AllocationRequest build_allocation_request(const ScenarioConfig& config);

// Strict TOML-subset parser: [table] / [[array-of-tables]] headers,
// key = value with numbers, strings, booleans, inline comments. Unknown keys
// and sections are rejected with line context. Values merge into `config`,
// so defaults can be layered (built-ins, then an optional defaults file, then
// the scenario).
void parse_scenario_into(const std::string& path, ScenarioConfig& config);

ScenarioConfig parse_scenario_file(const std::string& path);

// Echo of every resolved field, used for output metadata blocks.
std::vector<std::pair<std::string, std::string>> resolved_config(const ScenarioConfig& config);

}  // namespace cvqkd
