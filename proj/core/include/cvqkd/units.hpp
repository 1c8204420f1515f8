#pragma once

namespace cvqkd {

// physical constants
inline constexpr double kSpeedOfLightNmThz = 299792.458;  // c in nm*THz
inline constexpr double kSpeedOfLightMPerS = 2.99792458e8;
inline constexpr double kPlanckJs = 6.62607015e-34;

// 100 GHz ITU grid, C band
inline constexpr double kGridBaseThz = 190.0;
inline constexpr double kGridSpacingThz = 0.1;
inline constexpr double kCBandMinNm = 1528.0;
inline constexpr double kCBandMaxNm = 1568.0;

double dbm_to_mw(double power_dbm);
double mw_to_dbm(double power_mw);

struct ItuChannel {
  int index = 0;
  double frequency_thz = 0.0;
  double wavelength_nm = 0.0;
};

// Rejects indices whose wavelength falls outside the C band.
ItuChannel itu_channel(int index);

struct FiberLink {
  double length_km = 25.0;
  double alpha_db_per_km = 0.2;
  double n2_m2_per_mw = 3e-23;  // Kerr coefficient
  double a_eff_um2 = 83.0;      // effective mode area

  double alpha_lin_per_km() const;
};

// Power transmission 10^(-alpha*L/10) over a segment of the link.
double fiber_transmission(const FiberLink& link, double length_km);

// Raman/Kerr effective interaction length (1 - e^(-alpha*L)) / alpha, in km.
double effective_length_km(const FiberLink& link, double length_km);

enum class NoiseRef { AtAlice, AtBob };

struct ShotNoise {
  double value = 0.0;  // multiples of N_0
  NoiseRef ref = NoiseRef::AtAlice;
};

}  // namespace cvqkd
