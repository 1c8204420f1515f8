#include <benchmark/benchmark.h>

#include "cvqkd/allocator.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/noise.hpp"
#include "cvqkd/scenario.hpp"

namespace {

using namespace cvqkd;

CoexistScenario loaded_scenario(int n_channels) {
  CoexistScenario s;
  s.link.length_km = 25.0;
  for (int i = 0; i < n_channels; ++i) {
    const int index = 12 + i;
    if (index == s.system.quantum_channel.index) continue;
    s.channels.push_back({itu_channel(index),
                          i % 2 == 0 ? Direction::Forward : Direction::Backward, 0.0,
                          Modulation::Continuous});
  }
  return s;
}

void bm_secret_key_rate(benchmark::State& state) {
  CvqkdSystem sys;
  for (auto _ : state) {
    benchmark::DoNotOptimize(secret_key_rate(sys, 0.2511886432, 0.03));
  }
}
BENCHMARK(bm_secret_key_rate);

void bm_null_key_threshold(benchmark::State& state) {
  CvqkdSystem sys;
  for (auto _ : state) {
    benchmark::DoNotOptimize(null_key_threshold(sys, 0.2511886432));
  }
}
BENCHMARK(bm_null_key_threshold);

void bm_noise_budget(benchmark::State& state) {
  const CoexistScenario s = loaded_scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_noise_budget(s, NoiseRef::AtAlice));
  }
}
BENCHMARK(bm_noise_budget)->Arg(1)->Arg(8)->Arg(32);

void bm_scenario_key_rate(benchmark::State& state) {
  const CoexistScenario s = loaded_scenario(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scenario_key_rate(s));
  }
}
BENCHMARK(bm_scenario_key_rate);

void bm_allocate(benchmark::State& state) {
  AllocationRequest req;
  req.link.length_km = 25.0;
  req.forward_power_dbm = 2.0;
  req.backward_power_dbm = 1.0;
  for (int index = 30; index < 30 + state.range(0); ++index) {
    if (index == req.system.quantum_channel.index) continue;
    req.candidate_indices.push_back(index);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(allocate(req));
  }
}
BENCHMARK(bm_allocate)->Arg(4)->Arg(12);

void bm_power_envelope(benchmark::State& state) {
  CvqkdSystem sys;
  FiberLink link;
  MuxSpec mux;
  const RamanProfile profile = RamanProfile::flat();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        max_tolerable_power(50.0, Direction::Forward, sys, link, mux, profile));
  }
}
BENCHMARK(bm_power_envelope);

void bm_simulate_session(benchmark::State& state) {
  CvqkdSystem sys;
  AcquisitionConfig cfg;
  cfg.n_total_pulses = static_cast<std::uint64_t>(state.range(0));
  cfg.block_pulses = cfg.n_total_pulses / 20;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(simulate_homodyne_session(sys, 0.2511886432, 0.03, cfg));
  }
}
BENCHMARK(bm_simulate_session)->Arg(2'000'000)->Arg(200'000'000);

void bm_estimate(benchmark::State& state) {
  CvqkdSystem sys;
  AcquisitionConfig cfg;
  const Session session = simulate_homodyne_session(sys, 0.2511886432, 0.03, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_t_xi(session, sys));
  }
}
BENCHMARK(bm_estimate);

void bm_schedule_experiment(benchmark::State& state) {
  CvqkdSystem sys;
  AcquisitionConfig cfg;
  cfg.n_total_pulses = 20'000'000;
  cfg.block_pulses = 100'000;
  cfg.drift = DriftModel::random_walk();
  cfg.schedule = CalibrationSchedule::Sequential;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_schedule_experiment(sys, 0.2511886432, 0.03, cfg, 4));
  }
}
BENCHMARK(bm_schedule_experiment);

}  // namespace

BENCHMARK_MAIN();
