#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "pondscat/dynamics.hpp"
#include "pondscat/parallel.hpp"
#include "pondscat/params.hpp"
#include "pondscat/rng.hpp"

namespace pondscat {

/// How injection positions are generated. Counts are controlled either by
/// samples_per_plane (full-disc-equivalent count per plane) or directly by
/// density_per_R2; positions are a pure function of (seed, plane, index).
struct SamplingConfig {
  int plane_min = -27;
  int plane_max = 5;
  std::optional<double> samples_per_plane;  ///< default 3e4 when nothing is set
  std::optional<double> density_per_R2;
  std::optional<double> target_total;  ///< importance mode: rescale density to this total
  double disc_radius_R = 2.0;
  bool naive = false;  ///< sample the full disc instead of the scanned region
  std::uint64_t seed = 0;
  std::uint64_t total_cap = 100000000;

  // Importance-region construction. The detected set spans several decades in
  // radius, so the coarse scan runs on a (psi, ln r) grid zoomed per plane by
  // a radial probe, then the mask is dilated.
  int probe_azimuths = 7;
  int probe_radii = 65;
  double probe_r_min = 1e-6;
  int scan_psi_cells = 48;
  int scan_log_r_cells = 36;
  int dilate_cells = 2;
  double r_margin = 3.0;
};

inline double effective_density(const SamplingConfig& cfg) {
  if (cfg.samples_per_plane && cfg.density_per_R2) {
    throw ConfigError("give samples_per_plane or density_per_R2, not both");
  }
  const double disc_area = 3.14159265358979323846 * cfg.disc_radius_R * cfg.disc_radius_R;
  if (cfg.density_per_R2) return *cfg.density_per_R2;
  const double spp = cfg.samples_per_plane ? *cfg.samples_per_plane : 30000.0;
  return spp / disc_area;
}

/// One annular sector cell of a plane's sampling region, first quadrant only;
/// samples are mirrored into all four quadrants. Area covers the full circle.
struct RegionCell {
  double psi_a = 0, psi_b = 0;  ///< azimuth from the polarization (x) axis, [0, pi/2]
  double r2_a = 0, r2_b = 0;    ///< squared radius bounds
  double area = 0;              ///< 4 * dpsi * (r2_b - r2_a) / 2
};

struct PlaneRegion {
  int plane_n = 0;
  std::vector<RegionCell> cells;       // empty in naive mode or for an empty plane
  std::vector<double> cumulative_area; // prefix sums over cells
  double area = 0;                     // sampled area of this plane [R^2]
  std::uint64_t count = 0;             // planned samples on this plane
};

struct SamplingPlan {
  std::vector<PlaneRegion> planes;
  double density_per_R2 = 0;
  std::uint64_t total = 0;
  std::uint64_t scan_trajectories = 0;
  bool naive = false;
  double disc_radius_R = 2.0;
  std::uint64_t seed = 0;
};

namespace detail {

/// Detection predicate used by the scan: ring hit with W above threshold.
inline bool injection_detected(double x0, double y0, int plane, const SimParams& p,
                               double step) {
  const TrajectoryResult tr = integrate(derive_initial_state(p, x0, y0, plane), p, step);
  if (!std::isfinite(tr.kinetic_energy_MeV)) return false;
  if (tr.kinetic_energy_MeV < p.w_threshold_MeV) return false;
  return ballistic_hit(tr.exit_state, p).in_ring;
}

/// Radial probe: log-spaced radii along a few first-quadrant azimuths.
/// Returns the detected radius range, or nothing if the plane is empty.
inline std::optional<std::pair<double, double>> probe_plane(int plane, const SimParams& p,
                                                            const SamplingConfig& cfg,
                                                            double step,
                                                            std::uint64_t* n_traj) {
  const double lr_min = std::log(cfg.probe_r_min);
  const double lr_max = std::log(cfg.disc_radius_R);
  double r_lo = 0, r_hi = 0;
  bool any = false;
  for (int ia = 0; ia < cfg.probe_azimuths; ++ia) {
    const double psi = (3.14159265358979323846 / 2.0) * ia / (cfg.probe_azimuths - 1);
    const double cx = std::cos(psi), sy = std::sin(psi);
    for (int j = 0; j < cfg.probe_radii; ++j) {
      const double r = std::exp(lr_min + (lr_max - lr_min) * j / (cfg.probe_radii - 1));
      if (n_traj) ++*n_traj;
      if (injection_detected(r * cx, r * sy, plane, p, step)) {
        if (!any) {
          r_lo = r_hi = r;
          any = true;
        } else {
          r_lo = std::min(r_lo, r);
          r_hi = std::max(r_hi, r);
        }
      }
    }
  }
  if (!any) return std::nullopt;
  return std::make_pair(r_lo, r_hi);
}

}  // namespace detail

/// Detected radius range of one plane from the log-spaced radial probe, or
/// nothing if the probe finds no detection.
inline std::optional<std::pair<double, double>> probe_detected_radius_range(
    const SimParams& p, int plane, const SamplingConfig& cfg, double step,
    std::uint64_t* n_trajectories = nullptr) {
  return detail::probe_plane(plane, p, cfg, step, n_trajectories);
}

/// Build per-plane sampling regions (importance mode): probe, scan a
/// (psi, ln r) grid over the detected radius range, dilate the mask, and keep
/// the marked cells. Deterministic and independent of the worker count.
inline std::vector<PlaneRegion> build_regions(const SimParams& p, const SamplingConfig& cfg,
                                              double step, int workers,
                                              std::uint64_t* scan_trajectories = nullptr) {
  const int n_planes = cfg.plane_max - cfg.plane_min + 1;
  std::vector<PlaneRegion> regions(n_planes);
  std::vector<std::uint64_t> traj_counts(n_planes, 0);

  parallel_for(n_planes, workers, [&](std::size_t idx) {
    const int plane = cfg.plane_min + static_cast<int>(idx);
    PlaneRegion& reg = regions[idx];
    reg.plane_n = plane;
    const auto range = detail::probe_plane(plane, p, cfg, step, &traj_counts[idx]);
    if (!range) return;

    const double r_lo = std::max(range->first / cfg.r_margin, 0.25 * cfg.probe_r_min);
    const double r_hi = std::min(range->second * cfg.r_margin, cfg.disc_radius_R);
    const int kp = cfg.scan_psi_cells;
    const int kr = cfg.scan_log_r_cells;
    const double dpsi = (3.14159265358979323846 / 2.0) / kp;
    const double lr_lo = std::log(r_lo);
    const double dlr = (std::log(r_hi) - lr_lo) / kr;

    std::vector<char> mask(static_cast<std::size_t>(kp) * kr, 0);
    for (int i = 0; i < kp; ++i) {
      const double psi = (i + 0.5) * dpsi;
      const double cx = std::cos(psi), sy = std::sin(psi);
      for (int j = 0; j < kr; ++j) {
        const double r = std::exp(lr_lo + (j + 0.5) * dlr);
        ++traj_counts[idx];
        mask[static_cast<std::size_t>(i) * kr + j] =
            detail::injection_detected(r * cx, r * sy, plane, p, step) ? 1 : 0;
      }
    }

    // Chebyshev dilation; psi reflects at both quadrant edges, ln r clamps.
    const int d = cfg.dilate_cells;
    std::vector<char> dilated(mask.size(), 0);
    auto reflect_psi = [kp](int i) {
      if (i < 0) i = -1 - i;
      if (i >= kp) i = 2 * kp - 1 - i;
      return i;
    };
    for (int i = 0; i < kp; ++i) {
      for (int j = 0; j < kr; ++j) {
        bool on = false;
        for (int di = -d; di <= d && !on; ++di) {
          const int ii = reflect_psi(i + di);
          for (int dj = -d; dj <= d; ++dj) {
            const int jj = std::clamp(j + dj, 0, kr - 1);
            if (mask[static_cast<std::size_t>(ii) * kr + jj]) {
              on = true;
              break;
            }
          }
        }
        dilated[static_cast<std::size_t>(i) * kr + j] = on ? 1 : 0;
      }
    }

    for (int i = 0; i < kp; ++i) {
      for (int j = 0; j < kr; ++j) {
        if (!dilated[static_cast<std::size_t>(i) * kr + j]) continue;
        RegionCell cell;
        cell.psi_a = i * dpsi;
        cell.psi_b = (i + 1) * dpsi;
        const double ra = std::exp(lr_lo + j * dlr);
        const double rb = std::exp(lr_lo + (j + 1) * dlr);
        cell.r2_a = ra * ra;
        cell.r2_b = rb * rb;
        cell.area = 4.0 * dpsi * 0.5 * (cell.r2_b - cell.r2_a);
        reg.cells.push_back(cell);
      }
    }
    reg.cumulative_area.reserve(reg.cells.size());
    double acc = 0;
    for (const auto& c : reg.cells) {
      acc += c.area;
      reg.cumulative_area.push_back(acc);
    }
    reg.area = acc;
  });

  if (scan_trajectories) {
    for (auto c : traj_counts) *scan_trajectories += c;
  }
  return regions;
}

/// Assign per-plane sample counts at constant density and check the cap.
inline SamplingPlan make_plan(std::vector<PlaneRegion> regions, const SamplingConfig& cfg,
                              double density) {
  SamplingPlan plan;
  plan.naive = cfg.naive;
  plan.disc_radius_R = cfg.disc_radius_R;
  plan.seed = cfg.seed;
  const double disc_area =
      3.14159265358979323846 * cfg.disc_radius_R * cfg.disc_radius_R;
  double total_area = 0;
  for (auto& reg : regions) {
    if (cfg.naive) reg.area = disc_area;
    total_area += reg.area;
  }
  if (cfg.target_total) {
    if (!(total_area > 0)) throw ConfigError("sampling region is empty");
    density = *cfg.target_total / total_area;
  }
  plan.density_per_R2 = density;
  for (auto& reg : regions) {
    reg.count = static_cast<std::uint64_t>(std::llround(density * reg.area));
    plan.total += reg.count;
  }
  if (plan.total > cfg.total_cap) {
    throw ConfigError("requested " + std::to_string(plan.total) +
                      " trajectories exceeds the cap of " + std::to_string(cfg.total_cap));
  }
  plan.planes = std::move(regions);
  return plan;
}

/// Build the full plan: naive mode skips the scan entirely.
inline SamplingPlan build_sampling_plan(const SimParams& p, const SamplingConfig& cfg,
                                        double step, int workers) {
  if (cfg.plane_min > cfg.plane_max) throw ConfigError("empty plane range");
  std::uint64_t scan_traj = 0;
  std::vector<PlaneRegion> regions;
  if (cfg.naive) {
    regions.resize(cfg.plane_max - cfg.plane_min + 1);
    for (int i = 0; i < static_cast<int>(regions.size()); ++i) {
      regions[i].plane_n = cfg.plane_min + i;
    }
  } else {
    regions = build_regions(p, cfg, step, workers, &scan_traj);
  }
  SamplingPlan plan = make_plan(std::move(regions), cfg, effective_density(cfg));
  plan.scan_trajectories = scan_traj;
  return plan;
}

/// Injection position k of a plane: uniform over the plane's sampling region,
/// depending only on (seed, plane, k).
inline std::array<double, 2> sample_position(const SamplingPlan& plan, const PlaneRegion& reg,
                                             std::uint64_t k) {
  const auto draw0 = counter_draws(plan.seed, reg.plane_n, k, 0);
  if (plan.naive) {
    const double r = plan.disc_radius_R * std::sqrt(draw0.u[0]);
    const double ang = 2.0 * 3.14159265358979323846 * draw0.u[1] - 3.14159265358979323846;
    return {r * std::cos(ang), r * std::sin(ang)};
  }
  const auto draw1 = counter_draws(plan.seed, reg.plane_n, k, 1);
  const double t = draw0.u[0] * reg.area;
  const auto it =
      std::upper_bound(reg.cumulative_area.begin(), reg.cumulative_area.end(), t);
  const std::size_t ci =
      std::min<std::size_t>(it - reg.cumulative_area.begin(), reg.cells.size() - 1);
  const RegionCell& cell = reg.cells[ci];
  const double r = std::sqrt(cell.r2_a + draw0.u[1] * (cell.r2_b - cell.r2_a));
  const double psi = cell.psi_a + draw1.u[0] * (cell.psi_b - cell.psi_a);
  const std::uint32_t quadrant = draw1.words[2] & 3u;
  const double sx = (quadrant & 1u) ? -1.0 : 1.0;
  const double sy = (quadrant & 2u) ? -1.0 : 1.0;
  return {sx * r * std::cos(psi), sy * r * std::sin(psi)};
}

}  // namespace pondscat
