#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pondscat/errors.hpp"

namespace pondscat {

/// Electron rest energy mc^2 [MeV]. Fixed constant of the internal unit system.
inline constexpr double kElectronRestMeV = 0.511;

enum class EnvelopeKind { Sin2, None };

/// Physical setup in lab units (um, cm, keV, deg).
///
/// Intensity is given either as eta0 or as the dimensionless amplitude a
/// (eta0 = a / sqrt(2)); setting both is an error. If neither is set, a = 3.
struct PhysicalConfig {
  double lambda_um = 1.0;         ///< laser wavelength
  double focal_radius_um = 10.0;  ///< focal spot radius R
  double omega_tau = 480.0;       ///< pulse phase duration (total support of g)
  std::optional<double> a;
  std::optional<double> eta0;
  double mu = -1.55;              ///< asymmetry parameter, unrestricted real
  double electron_keV = 10.0;     ///< initial electron kinetic energy
  double detector_z_cm = 11.66;
  double detector_r1_cm = 8.99;
  double detector_r2_cm = 9.89;
  double smoothing_deg = 5.5;     ///< detector azimuthal width (histogram smoothing)
  double w_threshold_MeV = 0.9;
  EnvelopeKind envelope = EnvelopeKind::Sin2;
};

/// Detector ring geometry, kept both in cm and in units of R.
struct DetectorGeometry {
  double z_cm = 0, r1_cm = 0, r2_cm = 0;
  double z_R = 0, r1_R = 0, r2_R = 0;
  double focal_radius_cm = 0;  ///< one unit of R expressed in cm
};

/// Derived dimensionless parameters. Internal unit system: m = c = 1,
/// momenta in m*c, energies in units of m, transverse lengths in R,
/// longitudinal field coordinate in Rayleigh lengths L = omega R^2 = R/delta.
struct SimParams {
  double delta = 0;            ///< 1/(omega R) = lambda/(2 pi R)
  double delta_prime = 0;      ///< 1/(omega tau)
  double eta0 = 0;
  double mu = 0;
  double omega_tau = 0;
  double phase_half_span = 0;  ///< envelope support is |phi| <= phase_half_span
  double gamma0 = 0, beta0 = 0;
  double q_minus0 = 0;         ///< gamma0 (1 - beta0), conserved along trajectories
  double rayleigh_over_R = 0;  ///< L/R = 1/delta
  DetectorGeometry detector;
  double w_threshold_MeV = 0;
  double smoothing_deg = 0;
  EnvelopeKind envelope = EnvelopeKind::Sin2;
  std::vector<std::string> warnings;

  /// True when the envelope vanishes identically at |phi| >= phase_half_span.
  bool field_free_at(double phi) const {
    if (envelope == EnvelopeKind::None) return false;
    return std::abs(phi) >= phase_half_span * (1.0 - 1e-12);
  }
};

/// Averaged phase-space point. phi is the traveling-wave phase (independent
/// variable), rho_x/rho_y/zeta are positions in units of R, q_x/q_y the
/// averaged transverse momentum in m*c, q_minus = q0 - qz the conserved
/// light-front momentum.
struct PonderomotiveState {
  double phi = 0;
  double rho_x = 0, rho_y = 0;
  double zeta = 0;
  double q_x = 0, q_y = 0;
  double q_minus = 0;
};

inline SimParams derive_sim_params(const PhysicalConfig& cfg) {
  if (!(cfg.lambda_um > 0)) throw ParameterError("lambda_um must be positive");
  if (!(cfg.focal_radius_um > 0)) throw ParameterError("R_um must be positive");
  if (!(cfg.omega_tau > 0)) throw ParameterError("omega_tau must be positive");
  if (!(cfg.electron_keV > 0)) throw ParameterError("electron_keV must be positive");
  if (!(cfg.detector_r1_cm > 0) || !(cfg.detector_r1_cm < cfg.detector_r2_cm) ||
      !(cfg.detector_r2_cm < cfg.detector_z_cm)) {
    throw ParameterError("detector geometry must satisfy 0 < r1 < r2 < z");
  }
  if (!(cfg.smoothing_deg > 0)) throw ParameterError("smoothing_deg must be positive");
  if (cfg.w_threshold_MeV < 0) throw ParameterError("W_threshold_MeV must be non-negative");
  if (cfg.a && cfg.eta0) {
    throw ParameterError("intensity given both as a and as eta0; set only one");
  }

  SimParams p;
  const double two_pi = 2.0 * 3.14159265358979323846;
  p.delta = cfg.lambda_um / (two_pi * cfg.focal_radius_um);
  p.delta_prime = 1.0 / cfg.omega_tau;
  if (p.delta_prime > p.delta) {
    throw ParameterError("pulse too short for the focusing: requires 1/(omega tau) <= 1/(omega R)");
  }
  if (p.delta > 0.1) {
    p.warnings.push_back("delta = 1/(omega R) exceeds 0.1; averaged description is marginal");
  }

  const double a = cfg.a ? *cfg.a : (cfg.eta0 ? 0.0 : 3.0);
  p.eta0 = cfg.eta0 ? *cfg.eta0 : a / std::sqrt(2.0);
  if (!(p.eta0 > 0)) throw ParameterError("field intensity must be positive");

  p.mu = cfg.mu;
  p.omega_tau = cfg.omega_tau;
  p.phase_half_span = 0.5 * cfg.omega_tau;
  p.envelope = cfg.envelope;

  const double eps_over_m = cfg.electron_keV * 1e-3 / kElectronRestMeV;
  p.gamma0 = 1.0 + eps_over_m;
  p.beta0 = std::sqrt(1.0 - 1.0 / (p.gamma0 * p.gamma0));
  p.q_minus0 = p.gamma0 * (1.0 - p.beta0);
  p.rayleigh_over_R = 1.0 / p.delta;

  p.detector.z_cm = cfg.detector_z_cm;
  p.detector.r1_cm = cfg.detector_r1_cm;
  p.detector.r2_cm = cfg.detector_r2_cm;
  p.detector.focal_radius_cm = cfg.focal_radius_um * 1e-4;
  p.detector.z_R = cfg.detector_z_cm / p.detector.focal_radius_cm;
  p.detector.r1_R = cfg.detector_r1_cm / p.detector.focal_radius_cm;
  p.detector.r2_R = cfg.detector_r2_cm / p.detector.focal_radius_cm;

  p.w_threshold_MeV = cfg.w_threshold_MeV;
  p.smoothing_deg = cfg.smoothing_deg;
  return p;
}

/// State of an electron sitting at (x0, y0, z0) (units of R) when the pulse
/// leading edge arrives (phi = -phase_half_span), moving along +z.
inline PonderomotiveState derive_initial_state(const SimParams& p, double x0, double y0,
                                               double z0) {
  if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(z0)) {
    throw ParameterError("injection position must be finite");
  }
  PonderomotiveState st;
  st.phi = -p.phase_half_span;
  st.rho_x = x0;
  st.rho_y = y0;
  st.zeta = z0;
  st.q_x = 0;
  st.q_y = 0;
  st.q_minus = p.q_minus0;
  return st;
}

}  // namespace pondscat
