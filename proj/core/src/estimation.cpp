#include "cvqkd/estimation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "cvqkd/keyrate.hpp"

namespace cvqkd {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Stream tags keep the drift path, block draws and ensemble seeds on
// independent substreams of one user seed.
constexpr std::uint64_t kStreamShot = 0x5u;
constexpr std::uint64_t kStreamSignal = 0x6u;
constexpr std::uint64_t kStreamDrift = 0x7u;
constexpr std::uint64_t kStreamCurve = 0x8u;
constexpr std::uint64_t kStreamPulse = 0x9u;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ stream * 0xD6E8FEB86659FD93ull) ^ index);
}

// Explicit generator stack (engine, uniform mapping, Box-Muller normals,
// Marsaglia-Tsang gammas) so sampled values are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // (0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * kPi * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double gamma(double shape) {
    if (shape <= 0.0) {
      return 0.0;
    }
    if (shape < 1.0) {
      return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      double x = normal();
      const double t = 1.0 + c * x;
      if (t <= 0.0) {
        continue;
      }
      const double v = t * t * t;
      const double u = uniform();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) {
        return d * v;
      }
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
        return d * v;
      }
    }
  }

  double chi2(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

double signal_bob_variance(const CvqkdSystem& system, double transmission,
                           double xi_input, double n0_level) {
  const double eta_t = system.eta_b * transmission;
  return eta_t * system.v_a + n0_level + eta_t * xi_input + system.v_el;
}

}  // namespace

const char* to_string(CalibrationSchedule s) {
  return s == CalibrationSchedule::Alternating ? "alternating" : "sequential";
}

const char* to_string(DriftModel::Kind k) {
  return k == DriftModel::Kind::None ? "none" : "random_walk";
}

void validate(const AcquisitionConfig& cfg) {
  if (cfg.block_pulses == 0) {
    throw std::invalid_argument("acquisition: block_pulses must be > 0");
  }
  if (cfg.n_total_pulses % cfg.block_pulses != 0) {
    throw std::invalid_argument("acquisition: block_pulses must divide n_total_pulses");
  }
  if (cfg.n_total_pulses < 2 * cfg.block_pulses) {
    throw std::invalid_argument("acquisition: need at least two blocks");
  }
  if (cfg.drift.kind == DriftModel::Kind::RandomWalk && cfg.drift.step_per_pulse < 0.0) {
    throw std::invalid_argument("acquisition: drift step must be >= 0");
  }
}

BlockRecord sample_shot_block(std::uint64_t seed, std::uint64_t index,
                              std::uint64_t pulses, double n0_level, double v_el) {
  if (pulses == 0) {
    throw std::invalid_argument("sample_shot_block: empty block");
  }
  Rng rng(derive_seed(seed, kStreamShot, index));
  const double true_var = n0_level + v_el;
  const double pulses_d = static_cast<double>(pulses);
  BlockRecord rec;
  rec.index = index;
  rec.shot = true;
  rec.pulses = pulses;
  rec.variance = true_var * rng.chi2(pulses_d) / pulses_d;
  rec.covariance = 0.0;
  return rec;
}

BlockRecord sample_signal_block(std::uint64_t seed, std::uint64_t index,
                                std::uint64_t pulses, double n0_level,
                                const CvqkdSystem& system, double transmission,
                                double xi_input) {
  if (pulses == 0) {
    throw std::invalid_argument("sample_signal_block: empty block");
  }
  Rng rng(derive_seed(seed, kStreamSignal, index));
  const double pulses_d = static_cast<double>(pulses);
  const double v_a = system.v_a;
  const double cov_true = std::sqrt(system.eta_b * transmission) * v_a;
  const double var_b = signal_bob_variance(system, transmission, xi_input, n0_level);

  // Wishart(pulses, Sigma/pulses) for the zero-mean second-moment pair via
  // the Bartlett decomposition of the 2x2 covariance.
  const double l11 = std::sqrt(v_a);
  const double l21 = cov_true / l11;
  const double l22 = std::sqrt(var_b - l21 * l21);
  const double a11 = std::sqrt(rng.chi2(pulses_d));
  const double a21 = rng.normal();
  const double a22 = std::sqrt(rng.chi2(pulses_d - 1.0));

  // Rows of L*A give the scaled sample factors.
  const double m11 = l11 * a11;
  const double m21 = l21 * a11 + l22 * a21;
  const double m22 = l22 * a22;

  BlockRecord rec;
  rec.index = index;
  rec.shot = false;
  rec.pulses = pulses;
  rec.covariance = m11 * m21 / pulses_d;
  rec.variance = (m21 * m21 + m22 * m22) / pulses_d;
  return rec;
}

std::vector<double> drift_levels(const DriftModel& drift, std::uint64_t seed,
                                 std::uint64_t n_blocks, std::uint64_t block_pulses) {
  std::vector<double> levels(n_blocks, 1.0);
  if (drift.kind == DriftModel::Kind::None || drift.step_per_pulse == 0.0) {
    return levels;
  }
  const double sigma_block =
      drift.step_per_pulse * std::sqrt(static_cast<double>(block_pulses));
  double level = 1.0;
  for (std::uint64_t k = 0; k < n_blocks; ++k) {
    if (k > 0) {
      Rng rng(derive_seed(seed, kStreamDrift, k));
      level += sigma_block * rng.normal();
    }
    levels[k] = level;
  }
  return levels;
}

namespace {

bool block_is_shot(const AcquisitionConfig& cfg, std::uint64_t k, std::uint64_t n_blocks) {
  if (cfg.schedule == CalibrationSchedule::Alternating) {
    return k % 2 == 0;
  }
  return k < n_blocks / 2;
}

}  // namespace

Session simulate_homodyne_session(const CvqkdSystem& system, double transmission,
                                  double xi_input, const AcquisitionConfig& cfg) {
  validate(cfg);
  if (!(transmission > 0.0 && transmission <= 1.0)) {
    throw std::invalid_argument("simulate_homodyne_session: transmission outside (0, 1]");
  }
  if (xi_input < 0.0) {
    throw std::invalid_argument("simulate_homodyne_session: xi_true must be >= 0");
  }
  const std::uint64_t n_blocks = cfg.n_total_pulses / cfg.block_pulses;
  const std::vector<double> levels =
      drift_levels(cfg.drift, cfg.seed, n_blocks, cfg.block_pulses);
  Session session;
  session.blocks.reserve(n_blocks);
  for (std::uint64_t k = 0; k < n_blocks; ++k) {
    if (block_is_shot(cfg, k, n_blocks)) {
      session.blocks.push_back(
          sample_shot_block(cfg.seed, k, cfg.block_pulses, levels[k], system.v_el));
    } else {
      session.blocks.push_back(sample_signal_block(cfg.seed, k, cfg.block_pulses,
                                                   levels[k], system, transmission,
                                                   xi_input));
    }
  }
  return session;
}

Session simulate_homodyne_session_per_pulse(const CvqkdSystem& system,
                                            double transmission, double xi_input,
                                            const AcquisitionConfig& cfg) {
  validate(cfg);
  if (!(transmission > 0.0 && transmission <= 1.0)) {
    throw std::invalid_argument("simulate_homodyne_session: transmission outside (0, 1]");
  }
  if (xi_input < 0.0) {
    throw std::invalid_argument("simulate_homodyne_session: xi_true must be >= 0");
  }
  const std::uint64_t n_blocks = cfg.n_total_pulses / cfg.block_pulses;
  const std::vector<double> levels =
      drift_levels(cfg.drift, cfg.seed, n_blocks, cfg.block_pulses);
  const double root_eta_t = std::sqrt(system.eta_b * transmission);
  const double root_v_a = std::sqrt(system.v_a);
  Session session;
  session.blocks.reserve(n_blocks);
  for (std::uint64_t k = 0; k < n_blocks; ++k) {
    Rng rng(derive_seed(cfg.seed, kStreamPulse, k));
    const double pulses_d = static_cast<double>(cfg.block_pulses);
    BlockRecord rec;
    rec.index = k;
    rec.pulses = cfg.block_pulses;
    if (block_is_shot(cfg, k, n_blocks)) {
      rec.shot = true;
      const double noise_sd = std::sqrt(levels[k] + system.v_el);
      double sum_bb = 0.0;
      for (std::uint64_t p = 0; p < cfg.block_pulses; ++p) {
        const double x_b = noise_sd * rng.normal();
        sum_bb += x_b * x_b;
      }
      rec.variance = sum_bb / pulses_d;
      rec.covariance = 0.0;
    } else {
      rec.shot = false;
      const double noise_sd = std::sqrt(levels[k] + system.eta_b * transmission * xi_input +
                                        system.v_el);
      double sum_bb = 0.0;
      double sum_ab = 0.0;
      for (std::uint64_t p = 0; p < cfg.block_pulses; ++p) {
        const double x_a = root_v_a * rng.normal();
        const double x_b = root_eta_t * x_a + noise_sd * rng.normal();
        sum_bb += x_b * x_b;
        sum_ab += x_a * x_b;
      }
      rec.variance = sum_bb / pulses_d;
      rec.covariance = sum_ab / pulses_d;
    }
    session.blocks.push_back(rec);
  }
  return session;
}

EstimationResult estimate_t_xi(const Session& session, const CvqkdSystem& system) {
  double shot_weight = 0.0;
  double shot_sum = 0.0;
  double sig_weight = 0.0;
  double sig_var_sum = 0.0;
  double sig_cov_sum = 0.0;
  for (const BlockRecord& b : session.blocks) {
    const double w = static_cast<double>(b.pulses);
    if (b.shot) {
      shot_weight += w;
      shot_sum += w * b.variance;
    } else {
      sig_weight += w;
      sig_var_sum += w * b.variance;
      sig_cov_sum += w * b.covariance;
    }
  }
  if (shot_weight == 0.0 || sig_weight == 0.0) {
    throw std::invalid_argument("estimate_t_xi: need at least one shot and one signal block");
  }
  const double n0_hat = shot_sum / shot_weight - system.v_el;
  if (n0_hat <= 0.0) {
    throw std::domain_error("estimate_t_xi: calibration failure, shot-noise estimate <= 0");
  }
  const double c_hat = sig_cov_sum / sig_weight;
  const double vb_hat = sig_var_sum / sig_weight;
  const double t_hat = (c_hat / system.v_a) * (c_hat / system.v_a) / system.eta_b;
  if (t_hat <= 0.0) {
    throw std::domain_error("estimate_t_xi: degenerate transmission estimate");
  }
  const double eta_t_hat = system.eta_b * t_hat;
  EstimationResult res;
  res.t_hat = t_hat;
  res.n0_hat = n0_hat;
  res.xi_hat = (vb_hat - eta_t_hat * system.v_a - n0_hat - system.v_el) / eta_t_hat;
  res.xi_hat_at_bob = eta_t_hat * res.xi_hat;
  res.n_used = static_cast<std::uint64_t>(sig_weight);
  res.n_shot = static_cast<std::uint64_t>(shot_weight);
  res.t_flagged = t_hat > 1.0;
  res.std_xi = xi_estimator_sigma(system, std::min(t_hat, 1.0),
                                  std::max(res.xi_hat, 0.0), sig_weight);
  return res;
}

ScheduleOutcome run_schedule_experiment(const CvqkdSystem& system, double transmission,
                                        double xi_input, const AcquisitionConfig& cfg,
                                        int n_seeds) {
  if (n_seeds < 1) {
    throw std::invalid_argument("run_schedule_experiment: need at least one seed");
  }
  ScheduleOutcome out;
  out.n_seeds = n_seeds;
  double sum_hat = 0.0;
  double sum_delta2 = 0.0;
  double sum_delta_abs = 0.0;
  double sum_err2 = 0.0;
  for (int i = 0; i < n_seeds; ++i) {
    AcquisitionConfig run = cfg;
    run.seed = cfg.seed + static_cast<std::uint64_t>(i);
    const Session with_drift = simulate_homodyne_session(system, transmission, xi_input, run);
    AcquisitionConfig still = run;
    still.drift = DriftModel::none();
    const Session no_drift = simulate_homodyne_session(system, transmission, xi_input, still);
    const EstimationResult on = estimate_t_xi(with_drift, system);
    const EstimationResult off = estimate_t_xi(no_drift, system);
    const double delta = on.xi_hat_at_bob - off.xi_hat_at_bob;
    sum_hat += on.xi_hat;
    sum_delta2 += delta * delta;
    sum_delta_abs += std::abs(delta);
    const double err = off.xi_hat_at_bob - system.eta_b * transmission * xi_input;
    sum_err2 += err * err;
  }
  const double n = static_cast<double>(n_seeds);
  out.xi_hat_mean = sum_hat / n;
  out.drift_bias_rms = std::sqrt(sum_delta2 / n);
  out.drift_bias_mean_abs = sum_delta_abs / n;
  out.stat_sigma = std::sqrt(sum_err2 / n);
  return out;
}

std::vector<std::pair<std::uint64_t, double>> drift_curve(
    const DriftModel& drift, const std::vector<std::uint64_t>& window_pulses,
    std::uint64_t block_pulses, int n_seeds, std::uint64_t seed) {
  if (n_seeds < 1) {
    throw std::invalid_argument("drift_curve: need at least one seed");
  }
  if (block_pulses == 0) {
    throw std::invalid_argument("drift_curve: block_pulses must be > 0");
  }
  std::vector<std::pair<std::uint64_t, double>> curve;
  curve.reserve(window_pulses.size());
  for (const std::uint64_t window : window_pulses) {
    if (window == 0) {
      throw std::invalid_argument("drift_curve: zero window");
    }
    double sum_abs = 0.0;
    if (drift.kind == DriftModel::Kind::RandomWalk) {
      // Drift-process component: difference of consecutive window means of
      // the shot-noise level walk, sampled at block granularity.
      const std::uint64_t k_blocks =
          (window + block_pulses - 1) / block_pulses;  // ceil
      const double granule = static_cast<double>(window) / static_cast<double>(k_blocks);
      const double sigma_g = drift.step_per_pulse * std::sqrt(granule);
      for (int s = 0; s < n_seeds; ++s) {
        Rng rng(derive_seed(seed, kStreamCurve,
                            window * 0x10001ull + static_cast<std::uint64_t>(s)));
        double level = 0.0;
        double m1 = 0.0;
        double m2 = 0.0;
        for (std::uint64_t k = 0; k < 2 * k_blocks; ++k) {
          if (k > 0) {
            level += sigma_g * rng.normal();
          }
          (k < k_blocks ? m1 : m2) += level;
        }
        sum_abs += std::abs(m2 - m1) / static_cast<double>(k_blocks);
      }
    } else {
      // Pure sampling floor: chi^2 spread of consecutive window variance
      // estimates at unit shot noise.
      const double w = static_cast<double>(window);
      for (int s = 0; s < n_seeds; ++s) {
        Rng rng(derive_seed(seed, kStreamCurve,
                            window * 0x10001ull + static_cast<std::uint64_t>(s)));
        const double v1 = rng.chi2(w) / w;
        const double v2 = rng.chi2(w) / w;
        sum_abs += std::abs(v2 - v1);
      }
    }
    curve.emplace_back(window, sum_abs / static_cast<double>(n_seeds));
  }
  return curve;
}

}  // namespace cvqkd
