#include "cvqkd/keyrate.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqkd {
namespace {

void require(bool ok, const char* message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

// von Neumann entropy term of a thermal state with mean photon number x.
double g_entropy(double x) {
  if (x < 0.0) {
    if (x > -1e-9) {
      return 0.0;
    }
    throw std::domain_error("secret_key_rate: non-physical covariance (negative eigenvalue)");
  }
  if (x == 0.0) {
    return 0.0;
  }
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

double checked_sqrt(double v, const char* what) {
  if (v < 0.0) {
    if (v > -1e-9) {
      return 0.0;
    }
    throw std::domain_error(what);
  }
  return std::sqrt(v);
}

void validate_system(const CvqkdSystem& s) {
  require(s.v_a > 0.0, "system: v_a must be > 0");
  require(s.eta_b > 0.0 && s.eta_b <= 1.0, "system: eta_b outside (0, 1]");
  require(s.beta_rec > 0.0 && s.beta_rec <= 1.0, "system: beta_rec outside (0, 1]");
  require(s.v_el >= 0.0, "system: v_el must be >= 0");
  require(s.clock_hz > 0.0, "system: clock_hz must be > 0");
}

}  // namespace

KeyRateResult secret_key_rate(const CvqkdSystem& system, double transmission,
                              double xi_input) {
  validate_system(system);
  require(transmission > 0.0 && transmission <= 1.0,
          "secret_key_rate: transmission outside (0, 1]");
  require(xi_input >= 0.0, "secret_key_rate: xi_in must be >= 0");

  const double v = system.v_a + 1.0;
  const double t = transmission;
  const double chi_line = 1.0 / t - 1.0 + xi_input;
  const double chi_hom = (1.0 + system.v_el - system.eta_b) / system.eta_b;
  const double chi_tot = chi_line + chi_hom / t;

  const double mutual_info =
      0.5 * std::log2((v + chi_tot) / (1.0 + chi_tot));

  // Symplectic eigenvalues of the shared state before/after Bob's projective
  // homodyne measurement (entangling-cloner channel, trusted detector).
  const double a = v * v * (1.0 - 2.0 * t) + 2.0 * t +
                   t * t * (v + chi_line) * (v + chi_line);
  const double b = t * t * (v * chi_line + 1.0) * (v * chi_line + 1.0);
  const double disc_ab = checked_sqrt(a * a - 4.0 * b,
                                      "secret_key_rate: non-physical covariance (A^2 < 4B)");
  const double lam1 = checked_sqrt(0.5 * (a + disc_ab), "secret_key_rate: eigenvalue 1");
  const double lam2 = checked_sqrt(0.5 * (a - disc_ab), "secret_key_rate: eigenvalue 2");

  const double root_b = std::sqrt(b);
  const double denom = t * (v + chi_tot);
  const double c = (v * root_b + t * (v + chi_line) + a * chi_hom) / denom;
  const double d = root_b * (v + root_b * chi_hom) / denom;
  const double disc_cd = checked_sqrt(c * c - 4.0 * d,
                                      "secret_key_rate: non-physical covariance (C^2 < 4D)");
  const double lam3 = checked_sqrt(0.5 * (c + disc_cd), "secret_key_rate: eigenvalue 3");
  const double lam4 = checked_sqrt(0.5 * (c - disc_cd), "secret_key_rate: eigenvalue 4");

  const double holevo = g_entropy((lam1 - 1.0) / 2.0) + g_entropy((lam2 - 1.0) / 2.0) -
                        g_entropy((lam3 - 1.0) / 2.0) - g_entropy((lam4 - 1.0) / 2.0);

  KeyRateResult res;
  res.mutual_info_bits = mutual_info;
  res.holevo_bits = holevo;
  res.key_bits_per_pulse = system.beta_rec * mutual_info - holevo;
  res.key_bits_per_second = res.key_bits_per_pulse * system.clock_hz;
  res.positive = res.key_bits_per_pulse > 0.0;
  return res;
}

NullKeyThreshold null_key_threshold(const CvqkdSystem& system, double transmission) {
  NullKeyThreshold out;
  if (!secret_key_rate(system, transmission, 0.0).positive) {
    out.xi = 0.0;
    out.feasible = false;
    return out;
  }
  out.feasible = true;
  double lo = 0.0;
  double hi = 1.0;
  if (secret_key_rate(system, transmission, hi).positive) {
    out.xi = hi;  // tolerable noise exceeds the search bracket
    return out;
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double k = secret_key_rate(system, transmission, mid).key_bits_per_pulse;
    if (std::abs(k) < 1e-12) {
      break;
    }
    (k > 0.0 ? lo : hi) = mid;
  }
  out.xi = mid;
  return out;
}

double xi_estimator_sigma(const CvqkdSystem& system, double transmission,
                          double xi_input, double n_samples) {
  validate_system(system);
  require(transmission > 0.0 && transmission <= 1.0,
          "xi_estimator_sigma: transmission outside (0, 1]");
  require(n_samples > 0.0, "xi_estimator_sigma: n_samples must be > 0");
  const double eta_t = system.eta_b * transmission;
  const double b = eta_t * (system.v_a + xi_input) + 1.0 + system.v_el;
  const double c = std::sqrt(eta_t) * system.v_a;
  const double db = 1.0 / eta_t;
  const double dc = -(2.0 / std::sqrt(eta_t)) * (1.0 + xi_input / system.v_a);
  const double var_b = 2.0 * b * b;
  const double var_c = b * system.v_a + c * c;
  const double cov_bc = 2.0 * c * b;
  const double var = db * db * var_b + dc * dc * var_c + 2.0 * db * dc * cov_bc;
  return std::sqrt(var / n_samples);
}

double xi_estimator_sigma_full(const CvqkdSystem& system, double transmission,
                               double xi_input, double n_signal, double n_shot) {
  require(n_shot > 0.0, "xi_estimator_sigma_full: n_shot must be > 0");
  const double pooled = xi_estimator_sigma(system, transmission, xi_input, n_signal);
  const double eta_t = system.eta_b * transmission;
  const double s = 1.0 + system.v_el;
  const double ref_var = (1.0 / (eta_t * eta_t)) * 2.0 * s * s / n_shot;
  return std::sqrt(pooled * pooled + ref_var);
}

double worst_case_xi(double xi_hat, double n_samples, const CvqkdSystem& system,
                     double transmission, double sigmas) {
  require(n_samples > 100.0, "worst_case_xi: n_samples must exceed 100");
  require(sigmas >= 0.0, "worst_case_xi: sigmas must be >= 0");
  const double at_xi = xi_hat > 0.0 ? xi_hat : 0.0;
  return xi_hat + sigmas * xi_estimator_sigma(system, transmission, at_xi, n_samples);
}

VaOptimum optimize_va(const CvqkdSystem& system, double transmission, double xi_input,
                      double grid_lo, double grid_hi, double grid_step) {
  require(grid_lo > 0.0 && grid_hi >= grid_lo && grid_step > 0.0,
          "optimize_va: bad grid");
  const int n_steps = static_cast<int>(std::round((grid_hi - grid_lo) / grid_step));
  VaOptimum best;
  best.v_a = grid_lo;
  best.key_bits_per_pulse = -1e300;
  for (int i = 0; i <= n_steps; ++i) {
    const double v_a = grid_lo + grid_step * i;
    CvqkdSystem trial = system;
    trial.v_a = v_a;
    const double key = secret_key_rate(trial, transmission, xi_input).key_bits_per_pulse;
    if (key > best.key_bits_per_pulse) {  // ties keep the smaller v_a
      best.key_bits_per_pulse = key;
      best.v_a = v_a;
    }
  }
  best.feasible = best.key_bits_per_pulse > 0.0;
  return best;
}

}  // namespace cvqkd
