#include "cvqkd/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvqkd {

double dbm_to_mw(double power_dbm) {
  if (!std::isfinite(power_dbm)) {
    throw std::invalid_argument("dbm_to_mw: power must be finite");
  }
  return std::pow(10.0, power_dbm / 10.0);
}

double mw_to_dbm(double power_mw) {
  if (!(power_mw > 0.0)) {
    throw std::invalid_argument("mw_to_dbm: power must be > 0 mW");
  }
  return 10.0 * std::log10(power_mw);
}

ItuChannel itu_channel(int index) {
  const double frequency_thz = kGridBaseThz + kGridSpacingThz * index;
  const double wavelength_nm = kSpeedOfLightNmThz / frequency_thz;
  if (wavelength_nm < kCBandMinNm || wavelength_nm > kCBandMaxNm) {
    throw std::out_of_range("itu_channel: index " + std::to_string(index) +
                            " falls outside the C band [" + std::to_string(kCBandMinNm) +
                            ", " + std::to_string(kCBandMaxNm) + "] nm");
  }
  return {index, frequency_thz, wavelength_nm};
}

double FiberLink::alpha_lin_per_km() const {
  return alpha_db_per_km * std::log(10.0) / 10.0;
}

double fiber_transmission(const FiberLink& link, double length_km) {
  if (length_km < 0.0) {
    throw std::invalid_argument("fiber_transmission: negative length");
  }
  return std::pow(10.0, -link.alpha_db_per_km * length_km / 10.0);
}

double effective_length_km(const FiberLink& link, double length_km) {
  if (length_km < 0.0) {
    throw std::invalid_argument("effective_length_km: negative length");
  }
  const double alpha = link.alpha_lin_per_km();
  if (alpha <= 0.0) {
    return length_km;
  }
  return (1.0 - std::exp(-alpha * length_km)) / alpha;
}

}  // namespace cvqkd
