#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cvqkd/system.hpp"

namespace cvqkd {

// Random-walk step of the shot-noise reference, N_0 per sqrt(pulse).
// Calibrated so the mean absolute relative drift between consecutive 2e8-pulse
// windows is 1.5e-3 under 1e5-pulse blocks.
inline constexpr double kDefaultDriftStepPerPulse = 1.6281027e-7;

struct DriftModel {
  enum class Kind { None, RandomWalk };
  Kind kind = Kind::None;
  double step_per_pulse = 0.0;

  static DriftModel none() { return {}; }
  static DriftModel random_walk(double step = kDefaultDriftStepPerPulse) {
    return {Kind::RandomWalk, step};
  }
};

enum class CalibrationSchedule { Alternating, Sequential };

const char* to_string(CalibrationSchedule s);
const char* to_string(DriftModel::Kind k);

struct AcquisitionConfig {
  std::uint64_t n_total_pulses = 2'000'000;
  std::uint64_t block_pulses = 100'000;  // 100 ms at the 1 MHz clock
  CalibrationSchedule schedule = CalibrationSchedule::Alternating;
  DriftModel drift;
  std::uint64_t seed = 1;
};

void validate(const AcquisitionConfig& cfg);

struct BlockRecord {
  std::uint64_t index = 0;  // position within the session
  bool shot = false;        // LO-only calibration block
  std::uint64_t pulses = 0;
  double variance = 0.0;    // sample var(x_B), nominal-N_0 units
  double covariance = 0.0;  // sample cov(x_A, x_B); zero for shot blocks
};

struct Session {
  std::vector<BlockRecord> blocks;
};

// Deterministic per-(seed, index) block samplers drawing the exact sampling
// distribution of the per-pulse moments (chi^2 for shot variance, Wishart for
// the signal second-moment pair). n0_level is the instantaneous shot-noise
// variance in nominal units.
BlockRecord sample_shot_block(std::uint64_t seed, std::uint64_t index,
                              std::uint64_t pulses, double n0_level, double v_el);
BlockRecord sample_signal_block(std::uint64_t seed, std::uint64_t index,
                                std::uint64_t pulses, double n0_level,
                                const CvqkdSystem& system, double transmission,
                                double xi_input);

// Shot-noise levels at the start of each block under the drift model,
// deterministic per seed and independent of evaluation order.
std::vector<double> drift_levels(const DriftModel& drift, std::uint64_t seed,
                                 std::uint64_t n_blocks, std::uint64_t block_pulses);

// Block-level session generator (exact sufficient statistics).
Session simulate_homodyne_session(const CvqkdSystem& system, double transmission,
                                  double xi_input, const AcquisitionConfig& cfg);

// Pulse-by-pulse reference implementation of the same session model.
Session simulate_homodyne_session_per_pulse(const CvqkdSystem& system,
                                            double transmission, double xi_input,
                                            const AcquisitionConfig& cfg);

struct EstimationResult {
  double t_hat = 0.0;
  double xi_hat = 0.0;         // input-referred
  double xi_hat_at_bob = 0.0;  // detected-units residual, eta_b * t_hat * xi_hat
  double n0_hat = 0.0;
  double std_xi = 0.0;         // pooled-reference asymptotic sigma at the estimate
  std::uint64_t n_used = 0;    // signal pulses
  std::uint64_t n_shot = 0;
  bool t_flagged = false;      // t_hat outside (0, 1]
};

// Pooled-moment estimators of T and xi from a session's blocks.
EstimationResult estimate_t_xi(const Session& session, const CvqkdSystem& system);

// Bias statistics are reported in detected units at Bob (the units of the
// shot-noise reference the drift acts on); xi_hat_mean stays input-referred.
struct ScheduleOutcome {
  double xi_hat_mean = 0.0;
  double drift_bias_rms = 0.0;      // paired drift-on/off delta, RMS over seeds
  double drift_bias_mean_abs = 0.0;
  double stat_sigma = 0.0;          // RMS of (drift-off estimate - xi_true), at Bob
  int n_seeds = 0;
};

// Runs the configured schedule over a seed ensemble twice per seed with
// identical draws (drift enabled/disabled) to isolate the drift-attributable
// estimator error from the shared statistical error.
ScheduleOutcome run_schedule_experiment(const CvqkdSystem& system, double transmission,
                                        double xi_input, const AcquisitionConfig& cfg,
                                        int n_seeds = 64);

// Relative shot-noise drift vs observation window: for RandomWalk, the mean
// absolute relative difference between consecutive window means of the drift
// process; for None, the chi^2 statistical floor of consecutive window
// variance estimates.
std::vector<std::pair<std::uint64_t, double>> drift_curve(
    const DriftModel& drift, const std::vector<std::uint64_t>& window_pulses,
    std::uint64_t block_pulses, int n_seeds, std::uint64_t seed);

}  // namespace cvqkd
