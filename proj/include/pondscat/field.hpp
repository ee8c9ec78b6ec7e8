#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "pondscat/params.hpp"

namespace pondscat {

/// Temporal envelope g(u), u = phi / phase_half_span. Sin2 is cos^2(pi u / 2)
/// on |u| <= 1 and zero outside; None is identically 1.
inline double envelope(double u, EnvelopeKind kind = EnvelopeKind::Sin2) {
  if (kind == EnvelopeKind::None) return 1.0;
  if (std::abs(u) >= 1.0) return 0.0;
  const double c = std::cos(1.57079632679489662 * u);
  return c * c;
}

/// Gaussian-beam focal functions. G2 is F2 with the rho_perp^2 prefactor
/// divided out, which keeps the potential smooth on the beam axis.
struct FocalFunctions {
  std::complex<double> F1;
  std::complex<double> G2;
};

/// Evaluate F1 and G2 at s = rho_perp^2 and zeta = z / L (Rayleigh lengths).
/// w = 1 + 2i zeta never vanishes for real zeta, so both are finite.
inline FocalFunctions eval_focal_functions(double s, double zeta) {
  const std::complex<double> w(1.0, 2.0 * zeta);
  const std::complex<double> t = std::exp(-s / w) / (w * w * w);
  return {(w - s) * t, -t};
}

/// Potential value and its transverse gradient at one point.
struct PotentialSample {
  double U = 0;       ///< units of m
  double grad_x = 0;  ///< dU/drho_x
  double grad_y = 0;  ///< dU/drho_y
};

namespace detail {

// With t = e^{-s/w} / w^3 one has F1 = (w - s) t and G2 = -t, so every term
// of the potential is |t|^2 times a real polynomial: the complex phases
// cancel and the whole evaluation is real arithmetic around a single exp().
//   U = (eta0^2/2) g^2 e^{-2 s/den} / den^3 * P,   den = 1 + 4 zeta^2,
//   P = (1-s)^2 + 4 zeta^2 + mu^2 s^2 - 2 mu (rho_y^2 - rho_x^2)(1-s).
inline PotentialSample eval_potential(double rho_x, double rho_y, double zeta, double g,
                                      double eta0, double mu) {
  const double g2 = g * g;
  if (g2 == 0.0) return {};
  const double x2 = rho_x * rho_x;
  const double y2 = rho_y * rho_y;
  const double s = x2 + y2;
  const double d = y2 - x2;  // s * cos(2 psi), tan psi = rho_x / rho_y
  const double four_zeta2 = 4.0 * zeta * zeta;
  const double den = 1.0 + four_zeta2;
  const double one_m_s = 1.0 - s;
  const double P = one_m_s * one_m_s + four_zeta2 + mu * mu * s * s - 2.0 * mu * d * one_m_s;
  const double K = 0.5 * eta0 * eta0 * g2 * std::exp(-2.0 * s / den) / (den * den * den);
  const double Ps = 2.0 * ((s - 1.0) + mu * mu * s + mu * d);
  const double Pd = -2.0 * mu * one_m_s;
  const double common = Ps - 2.0 * P / den;
  PotentialSample out;
  out.U = K * P;
  out.grad_x = K * 2.0 * rho_x * (common - Pd);
  out.grad_y = K * 2.0 * rho_y * (common + Pd);
  return out;
}

}  // namespace detail

/// Ponderomotive potential and analytic transverse gradient.
/// Positions in units of R, zeta = z/L in Rayleigh lengths, U in units of m.
inline PotentialSample potential_sample(double rho_x, double rho_y, double zeta, double phi,
                                        const SimParams& p) {
  const double g = envelope(phi / p.phase_half_span, p.envelope);
  return detail::eval_potential(rho_x, rho_y, zeta, g, p.eta0, p.mu);
}

inline double potential(double rho_x, double rho_y, double zeta, double phi,
                        const SimParams& p) {
  return potential_sample(rho_x, rho_y, zeta, phi, p).U;
}

inline std::array<double, 2> potential_gradient(double rho_x, double rho_y, double zeta,
                                                double phi, const SimParams& p) {
  const PotentialSample f = potential_sample(rho_x, rho_y, zeta, phi, p);
  return {f.grad_x, f.grad_y};
}

}  // namespace pondscat
