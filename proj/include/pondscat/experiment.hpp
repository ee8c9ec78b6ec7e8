#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pondscat/dynamics.hpp"
#include "pondscat/parallel.hpp"
#include "pondscat/sampling.hpp"

namespace pondscat {

/// Rectangular node grid in the transverse plane, at fixed z/R and phase.
struct GridSpec {
  double x_min = -2, x_max = 2;
  int nx = 81;
  double y_min = -2, y_max = 2;
  int ny = 81;
  double z_over_R = 0;
  double phi = 0;

  void validate() const {
    if (nx < 2 || ny < 2) throw ParameterError("grid needs at least 2 nodes per axis");
    if (!(x_max > x_min) || !(y_max > y_min)) throw ParameterError("grid extent is empty");
  }
  double x_at(int ix) const { return x_min + (x_max - x_min) * ix / (nx - 1); }
  double y_at(int iy) const { return y_min + (y_max - y_min) * iy / (ny - 1); }
};

/// Potential sampled on grid nodes, row-major with y fastest: U[ix*ny + iy],
/// in units of m.
struct PotentialMap {
  GridSpec grid;
  std::vector<double> U;
};

inline PotentialMap potential_map(const GridSpec& grid, const SimParams& p) {
  grid.validate();
  PotentialMap map;
  map.grid = grid;
  map.U.resize(static_cast<std::size_t>(grid.nx) * grid.ny);
  const double zeta = grid.z_over_R * p.delta;
  for (int ix = 0; ix < grid.nx; ++ix) {
    for (int iy = 0; iy < grid.ny; ++iy) {
      map.U[static_cast<std::size_t>(ix) * grid.ny + iy] =
          potential(grid.x_at(ix), grid.y_at(iy), zeta, grid.phi, p);
    }
  }
  return map;
}

/// Outcome of one injected trajectory against the detector.
struct TrialOutcome {
  double W_MeV = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double hit_x_cm = std::numeric_limits<double>::quiet_NaN();
  double hit_y_cm = std::numeric_limits<double>::quiet_NaN();
  PonderomotiveState exit_state;
  bool detected = false;
  bool failed = false;
};

inline TrialOutcome evaluate_injection(double x0, double y0, int plane, const SimParams& p,
                                       double step) {
  TrialOutcome out;
  const TrajectoryResult tr = integrate(derive_initial_state(p, x0, y0, plane), p, step);
  out.exit_state = tr.exit_state;
  if (!std::isfinite(tr.kinetic_energy_MeV) || !std::isfinite(tr.exit_state.rho_x) ||
      !std::isfinite(tr.exit_state.rho_y) || !std::isfinite(tr.exit_state.q_x) ||
      !std::isfinite(tr.exit_state.q_y)) {
    out.failed = true;
    return out;
  }
  out.W_MeV = tr.kinetic_energy_MeV;
  out.theta = tr.polar_angle;
  const BallisticHit hit = ballistic_hit(tr.exit_state, p);
  out.hit_x_cm = hit.x_cm;
  out.hit_y_cm = hit.y_cm;
  out.alpha = hit.alpha;
  out.detected = hit.in_ring && out.W_MeV >= p.w_threshold_MeV;
  return out;
}

/// Per-node classification of injection positions at one plane.
struct DomainCell {
  bool detected = false;
  double W_MeV = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

struct DomainMap {
  int plane_n = 0;
  GridSpec grid;
  std::vector<DomainCell> cells;  // [ix*ny + iy]
};

inline DomainMap domain_scan(int plane_n, const GridSpec& grid, const SimParams& p,
                             double step = 0.25, int workers = 1) {
  grid.validate();
  DomainMap map;
  map.plane_n = plane_n;
  map.grid = grid;
  map.cells.resize(static_cast<std::size_t>(grid.nx) * grid.ny);
  parallel_for(grid.nx, workers, [&](std::size_t ix) {
    for (int iy = 0; iy < grid.ny; ++iy) {
      const TrialOutcome t =
          evaluate_injection(grid.x_at(static_cast<int>(ix)), grid.y_at(iy), plane_n, p, step);
      DomainCell& cell = map.cells[ix * grid.ny + iy];
      cell.detected = t.detected;
      cell.W_MeV = t.W_MeV;
      cell.alpha = t.alpha;
    }
  });
  return map;
}

/// One Monte Carlo trajectory of the scattering ensemble.
struct ScatterRecord {
  int plane_n = 0;
  std::uint64_t sample_index = 0;
  double x0 = 0, y0 = 0;
  double W_MeV = 0, theta = 0, alpha = 0;
  double hit_x_cm = 0, hit_y_cm = 0;
  bool detected = false;
};

struct ScatterStats {
  std::uint64_t sampled = 0;
  std::uint64_t detected = 0;
  std::uint64_t failed = 0;
  std::uint64_t scan_trajectories = 0;
  double region_area_R2 = 0;
  double density_per_R2 = 0;
};

struct ScatterResult {
  std::vector<ScatterRecord> records;  // ordered by (plane, sample index)
  ScatterStats stats;
};

/// Integrate every planned sample. Records are stored in canonical
/// (plane, index) order, so output is bitwise independent of the worker count.
inline ScatterResult run_scatter_plan(const SimParams& p, const SamplingPlan& plan,
                                      double step, int workers) {
  struct Chunk {
    std::size_t plane_idx;
    std::uint64_t begin, end;
    std::size_t offset;
  };
  constexpr std::uint64_t kChunk = 4096;
  std::vector<Chunk> chunks;
  std::size_t total = 0;
  for (std::size_t pi = 0; pi < plan.planes.size(); ++pi) {
    const std::uint64_t n = plan.planes[pi].count;
    for (std::uint64_t b = 0; b < n; b += kChunk) {
      chunks.push_back({pi, b, std::min(n, b + kChunk), total + b});
    }
    total += n;
  }

  ScatterResult res;
  res.records.resize(total);
  std::vector<std::uint64_t> detected_per_chunk(chunks.size(), 0);
  std::vector<std::uint64_t> failed_per_chunk(chunks.size(), 0);

  parallel_for(chunks.size(), workers, [&](std::size_t ci) {
    const Chunk& ch = chunks[ci];
    const PlaneRegion& reg = plan.planes[ch.plane_idx];
    for (std::uint64_t k = ch.begin; k < ch.end; ++k) {
      const auto pos = sample_position(plan, reg, k);
      const TrialOutcome t = evaluate_injection(pos[0], pos[1], reg.plane_n, p, step);
      ScatterRecord& rec = res.records[ch.offset + (k - ch.begin)];
      rec.plane_n = reg.plane_n;
      rec.sample_index = k;
      rec.x0 = pos[0];
      rec.y0 = pos[1];
      rec.W_MeV = t.W_MeV;
      rec.theta = t.theta;
      rec.alpha = t.alpha;
      rec.hit_x_cm = t.hit_x_cm;
      rec.hit_y_cm = t.hit_y_cm;
      rec.detected = t.detected;
      if (t.detected) ++detected_per_chunk[ci];
      if (t.failed) ++failed_per_chunk[ci];
    }
  });

  res.stats.sampled = total;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    res.stats.detected += detected_per_chunk[i];
    res.stats.failed += failed_per_chunk[i];
  }
  res.stats.density_per_R2 = plan.density_per_R2;
  res.stats.scan_trajectories = plan.scan_trajectories;
  for (const auto& reg : plan.planes) res.stats.region_area_R2 += reg.area;
  return res;
}

inline ScatterResult run_scatter(const SimParams& p, const SamplingConfig& cfg,
                                 double step = 0.25, int workers = 1) {
  return run_scatter_plan(p, build_sampling_plan(p, cfg, step, workers), step, workers);
}

/// Smoothed azimuthal distribution of detected electrons. Bin centers sit at
/// center_deg[k] = -180 + k * bin_width; smoothing is a circular moving
/// average of the count density over the detector's azimuthal width, and the
/// result is normalized to max 1.
struct AngularDistribution {
  double bin_width_deg = 1.0;
  std::vector<double> centers_deg;
  std::vector<std::uint64_t> counts;
  std::vector<double> smoothed;

  /// Smoothed value at the bin whose center is nearest to the given azimuth.
  double value_at_deg(double alpha_deg) const {
    const int nb = static_cast<int>(centers_deg.size());
    const int idx = static_cast<int>(std::llround((alpha_deg + 180.0) / bin_width_deg));
    return smoothed[static_cast<std::size_t>(((idx % nb) + nb) % nb)];
  }
};

inline AngularDistribution angular_histogram(const std::vector<ScatterRecord>& records,
                                             double bin_width_deg, double window_deg) {
  if (!(bin_width_deg > 0) || std::abs(std::remainder(360.0, bin_width_deg)) > 1e-9) {
    throw ParameterError("bin width must divide 360 degrees");
  }
  if (window_deg < bin_width_deg) {
    throw ParameterError("smoothing window must be at least one bin wide");
  }
  const int nb = static_cast<int>(std::llround(360.0 / bin_width_deg));
  AngularDistribution dist;
  dist.bin_width_deg = bin_width_deg;
  dist.centers_deg.resize(nb);
  dist.counts.assign(nb, 0);
  for (int k = 0; k < nb; ++k) dist.centers_deg[k] = -180.0 + k * bin_width_deg;

  std::uint64_t n_detected = 0;
  for (const auto& rec : records) {
    if (!rec.detected) continue;
    ++n_detected;
    const double deg = rec.alpha * (180.0 / 3.14159265358979323846);
    const int idx = static_cast<int>(std::llround((deg + 180.0) / bin_width_deg));
    ++dist.counts[static_cast<std::size_t>(((idx % nb) + nb) % nb)];
  }
  if (n_detected == 0) throw EmptyError("angular_histogram: no detected records");

  // Average the per-bin count density over a window of window_deg, with
  // fractional coverage of the edge bins and wrap-around.
  dist.smoothed.assign(nb, 0.0);
  const double half = window_deg / 2.0;
  const int reach = static_cast<int>(std::ceil(half / bin_width_deg - 0.5)) + 1;
  for (int i = 0; i < nb; ++i) {
    double acc = 0;
    for (int j = -reach; j <= reach; ++j) {
      const double lo = (j - 0.5) * bin_width_deg;
      const double hi = (j + 0.5) * bin_width_deg;
      const double cover = std::max(0.0, std::min(hi, half) - std::max(lo, -half));
      if (cover > 0) acc += cover * dist.counts[static_cast<std::size_t>(((i + j) % nb + nb) % nb)];
    }
    dist.smoothed[i] = acc / window_deg;
  }
  double peak = 0;
  for (double v : dist.smoothed) peak = std::max(peak, v);
  if (peak > 0) {
    for (double& v : dist.smoothed) v /= peak;
  }
  return dist;
}

}  // namespace pondscat
