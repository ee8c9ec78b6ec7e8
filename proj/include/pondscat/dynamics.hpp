#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "pondscat/field.hpp"
#include "pondscat/params.hpp"

namespace pondscat {

/// Longitudinal and time components of the averaged momentum on the dressed
/// mass shell q0^2 - qz^2 - qperp^2 = 1 + 2U (units m = 1) with q0 - qz = q_minus.
struct MassShell {
  double q_z = 0;
  double q_0 = 0;
};

inline MassShell close_mass_shell(double q_perp2, double q_minus, double U) {
  if (!(q_minus > 0)) throw DomainError("close_mass_shell: q_minus must be positive");
  const double q_z = 0.5 * ((1.0 + q_perp2 + 2.0 * U) / q_minus - q_minus);
  return {q_z, q_z + q_minus};
}

/// d/dphi of (rho_x, rho_y, zeta, q_x, q_y). zeta is stored in units of R and
/// advances by delta * qz / q_minus per unit phase; the beam's longitudinal
/// scale is the Rayleigh length L = R/delta, so the field is evaluated at
/// z/L = delta * zeta.
struct Derivatives {
  double rho_x = 0, rho_y = 0, zeta = 0, q_x = 0, q_y = 0;
};

namespace detail {

struct RhsEval {
  Derivatives d;
  double U = 0, q_z = 0, q_0 = 0;
  double closure_residual = 0;  // q_minus (2 qz + q_minus) - (1 + qperp^2 + 2U)
};

inline RhsEval eval_rhs(const PonderomotiveState& st, const SimParams& p) {
  const PotentialSample f =
      potential_sample(st.rho_x, st.rho_y, st.zeta * p.delta, st.phi, p);
  const double q_perp2 = st.q_x * st.q_x + st.q_y * st.q_y;
  const MassShell shell = close_mass_shell(q_perp2, st.q_minus, f.U);
  RhsEval ev;
  ev.U = f.U;
  ev.q_z = shell.q_z;
  ev.q_0 = shell.q_0;
  ev.closure_residual =
      st.q_minus * (2.0 * shell.q_z + st.q_minus) - (1.0 + q_perp2 + 2.0 * f.U);
  const double r = p.delta / st.q_minus;
  ev.d.rho_x = r * st.q_x;
  ev.d.rho_y = r * st.q_y;
  ev.d.zeta = r * shell.q_z;
  ev.d.q_x = -r * f.grad_x;
  ev.d.q_y = -r * f.grad_y;
  return ev;
}

}  // namespace detail

inline Derivatives eom_rhs(const PonderomotiveState& st, const SimParams& p) {
  return detail::eval_rhs(st, p).d;
}

/// Exit-state diagnostics of one integrated trajectory.
struct TrajectoryResult {
  PonderomotiveState exit_state;
  double kinetic_energy_MeV = 0;
  double polar_angle = 0;          ///< rad
  double q_minus_drift = 0;        ///< exact zero: q_minus is never integrated
  double lz_drift = 0;             ///< L_z(exit) - L_z(start)
  double closure_residual_max = 0; ///< max |shell identity residual| over substeps
  long step_count = 0;
};

/// Called after every accepted step (and once at the initial state) with the
/// state and the local U, q_z, q_0.
using StepObserver =
    std::function<void(const PonderomotiveState&, double U, double q_z, double q_0)>;

/// Kinetic energy [MeV] and polar angle [rad] of a field-free state.
/// Because q_minus is conserved and U vanishes outside the pulse, theta is a
/// function of W and q_minus alone: tan theta = sqrt(q-(2 q0 - q-) - 1)/(q0 - q-).
struct Observables {
  double W_MeV = 0;
  double theta = 0;
};

inline Observables observables(const PonderomotiveState& st, const SimParams& p) {
  if (!p.field_free_at(st.phi)) {
    throw StateError("observables: state is inside the envelope support");
  }
  const double q_perp2 = st.q_x * st.q_x + st.q_y * st.q_y;
  const MassShell shell = close_mass_shell(q_perp2, st.q_minus, 0.0);
  Observables out;
  out.W_MeV = (shell.q_0 - 1.0) * kElectronRestMeV;
  out.theta = std::atan2(std::sqrt(q_perp2), shell.q_z);
  return out;
}

/// Classic fixed-step RK4 over the envelope support [-span, +span] in phi.
/// The final step is truncated to land exactly on the end phase.
inline TrajectoryResult integrate(const PonderomotiveState& s0, const SimParams& p,
                                  double step = 0.25, const StepObserver* observer = nullptr) {
  if (!(step > 0)) throw StepError("integrate: step must be positive");
  if (step >= p.omega_tau / 10.0) {
    throw StepError("integrate: step too coarse to resolve the envelope");
  }

  const double phi_end = p.phase_half_span;
  PonderomotiveState st = s0;
  st.phi = -p.phase_half_span;

  const double lz0 = st.rho_x * st.q_y - st.rho_y * st.q_x;
  double residual_max = 0;
  long steps = 0;

  auto stage = [&](const PonderomotiveState& base, double h, const Derivatives& k,
                   double phi) {
    PonderomotiveState s = base;
    s.rho_x += h * k.rho_x;
    s.rho_y += h * k.rho_y;
    s.zeta += h * k.zeta;
    s.q_x += h * k.q_x;
    s.q_y += h * k.q_y;
    s.phi = phi;
    return s;
  };

  if (observer) {
    const auto ev = detail::eval_rhs(st, p);
    (*observer)(st, ev.U, ev.q_z, ev.q_0);
  }

  while (st.phi < phi_end) {
    const double h = std::min(step, phi_end - st.phi);
    const auto e1 = detail::eval_rhs(st, p);
    const auto e2 = detail::eval_rhs(stage(st, 0.5 * h, e1.d, st.phi + 0.5 * h), p);
    const auto e3 = detail::eval_rhs(stage(st, 0.5 * h, e2.d, st.phi + 0.5 * h), p);
    const auto e4 = detail::eval_rhs(stage(st, h, e3.d, st.phi + h), p);

    residual_max = std::max({residual_max, std::abs(e1.closure_residual),
                             std::abs(e2.closure_residual), std::abs(e3.closure_residual),
                             std::abs(e4.closure_residual)});

    const double w = h / 6.0;
    st.rho_x += w * (e1.d.rho_x + 2.0 * e2.d.rho_x + 2.0 * e3.d.rho_x + e4.d.rho_x);
    st.rho_y += w * (e1.d.rho_y + 2.0 * e2.d.rho_y + 2.0 * e3.d.rho_y + e4.d.rho_y);
    st.zeta += w * (e1.d.zeta + 2.0 * e2.d.zeta + 2.0 * e3.d.zeta + e4.d.zeta);
    st.q_x += w * (e1.d.q_x + 2.0 * e2.d.q_x + 2.0 * e3.d.q_x + e4.d.q_x);
    st.q_y += w * (e1.d.q_y + 2.0 * e2.d.q_y + 2.0 * e3.d.q_y + e4.d.q_y);
    st.phi = (h == step) ? st.phi + h : phi_end;
    ++steps;

    if (observer) {
      const auto ev = detail::eval_rhs(st, p);
      (*observer)(st, ev.U, ev.q_z, ev.q_0);
    }
  }
  st.phi = phi_end;

  TrajectoryResult res;
  res.exit_state = st;
  res.q_minus_drift = st.q_minus - s0.q_minus;
  res.lz_drift = (st.rho_x * st.q_y - st.rho_y * st.q_x) - lz0;
  res.closure_residual_max = residual_max;
  res.step_count = steps;
  if (p.field_free_at(st.phi)) {
    const Observables obs = observables(st, p);
    res.kinetic_energy_MeV = obs.W_MeV;
    res.polar_angle = obs.theta;
  } else {
    res.kinetic_energy_MeV = std::numeric_limits<double>::quiet_NaN();
    res.polar_angle = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

/// Straight-line flight from the exit state to the detector plane.
struct BallisticHit {
  bool crossed = false;  ///< the forward ray reaches the plane
  double x_cm = std::numeric_limits<double>::quiet_NaN();
  double y_cm = std::numeric_limits<double>::quiet_NaN();
  double radius_cm = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();  ///< rad, from the polarization plane
  bool in_ring = false;
};

inline BallisticHit ballistic_hit(const PonderomotiveState& st, const SimParams& p) {
  const double q_perp2 = st.q_x * st.q_x + st.q_y * st.q_y;
  const MassShell shell = close_mass_shell(q_perp2, st.q_minus, 0.0);
  BallisticHit hit;
  if (!(shell.q_z > 0)) return hit;  // never crosses the plane; a miss, not an error
  const double t = (p.detector.z_R - st.zeta) / shell.q_z;
  const double scale = p.detector.focal_radius_cm;
  hit.crossed = true;
  hit.x_cm = (st.rho_x + st.q_x * t) * scale;
  hit.y_cm = (st.rho_y + st.q_y * t) * scale;
  hit.radius_cm = std::hypot(hit.x_cm, hit.y_cm);
  hit.alpha = std::atan2(hit.y_cm, hit.x_cm);
  hit.in_ring = hit.radius_cm >= p.detector.r1_cm && hit.radius_cm <= p.detector.r2_cm;
  return hit;
}

}  // namespace pondscat
