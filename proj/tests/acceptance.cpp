// Acceptance suite: one check per criterion, each printing a PASS/FAIL line.
// Exits nonzero if any criterion fails.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pondscat/experiment.hpp"
#include "pondscat/output.hpp"

namespace fs = std::filesystem;
using namespace pondscat;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Criterion {
  int id;
  std::string title;
  bool pass = false;
  std::string detail;
};

SimParams reference_params(double mu = -1.55) {
  PhysicalConfig cfg;
  cfg.mu = mu;
  return derive_sim_params(cfg);
}

double cpu_seconds() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  auto to_s = [](const timeval& tv) { return tv.tv_sec + tv.tv_usec * 1e-6; };
  return to_s(usage.ru_utime) + to_s(usage.ru_stime);
}

struct RunClock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double cpu0 = cpu_seconds();
  double wall() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  double cpu() const { return cpu_seconds() - cpu0; }
};

// The runtime bounds are stated for 8 concurrent workers. When the host has
// fewer hardware threads, wall time cannot reflect 8-way parallelism, so the
// bound is checked against total CPU work divided by 8 (the ensemble scales
// linearly); both numbers are reported.
bool runtime_within(const RunClock& clock, double bound_s, std::string* detail) {
  const double wall = clock.wall();
  const double projected = clock.cpu() / 8.0;
  const bool eight_way = std::thread::hardware_concurrency() >= 8;
  char buf[160];
  std::snprintf(buf, sizeof buf, "wall %.1f s, cpu %.1f s, 8-worker projection %.1f s", wall,
                clock.cpu(), projected);
  *detail += buf;
  return eight_way ? wall <= bound_s : projected <= bound_s;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double theta_closed_form(double W_MeV, double q_minus) {
  const double q0 = 1.0 + W_MeV / kElectronRestMeV;
  return std::atan2(std::sqrt(q_minus * (2.0 * q0 - q_minus) - 1.0), q0 - q_minus);
}

Criterion criterion_gradient_fidelity() {
  Criterion c{1, "gradient fidelity vs central finite differences"};
  const SimParams p = reference_params();
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> dx(-3, 3), dz(-30, 10),
      dphi(-p.phase_half_span, p.phase_half_span);
  const double h = 1e-5;
  double max_rel = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = dx(gen), y = dx(gen), zeta = dz(gen), phi = dphi(gen);
    const auto grad = potential_gradient(x, y, zeta, phi, p);
    const double fx =
        (potential(x + h, y, zeta, phi, p) - potential(x - h, y, zeta, phi, p)) / (2 * h);
    const double fy =
        (potential(x, y + h, zeta, phi, p) - potential(x, y - h, zeta, phi, p)) / (2 * h);
    const double denom = std::hypot(grad[0], grad[1]) + 1e-12;
    max_rel = std::max(max_rel, std::hypot(grad[0] - fx, grad[1] - fy) / denom);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.pass = max_rel < 1e-6 && secs < 1.0;
  c.detail = fmt("max rel err %.3g (< 1e-6), %.3f s (< 1 s)", max_rel, secs);
  return c;
}

Criterion criterion_axis_closed_form() {
  Criterion c{2, "axis closed form and secondary maxima"};
  const SimParams p = reference_params();
  const double scale = 0.5 * p.eta0 * p.eta0;

  double max_dev = 0;
  for (double rx = 0; rx <= 2.5; rx += 1e-3) {
    const double s = rx * rx;
    const double bracket = 1.0 + (p.mu - 1.0) * s;
    const double closed = scale * std::exp(-2.0 * s) * bracket * bracket;
    max_dev = std::max(max_dev, std::abs(potential(rx, 0, 0, 0, p) - closed) / scale);
  }

  // numeric secondary maximum on the polarization axis
  double best_r = 0, best_u = -1;
  for (double rx = 0.8; rx <= 1.6; rx += 1e-5) {
    const double u = potential(rx, 0, 0, 0, p);
    if (u > best_u) {
      best_u = u;
      best_r = rx;
    }
  }
  const double height_ratio = best_u / potential(0, 0, 0, 0, p);

  // no secondary maximum on the y axis
  bool y_monotone = true;
  double prev = potential(0, 0, 0, 0, p);
  for (double ry = 0.005; ry <= 2.5; ry += 0.005) {
    const double u = potential(0, ry, 0, 0, p);
    if (u >= prev) y_monotone = false;
    prev = u;
  }

  const bool loc_ok = std::abs(best_r - 1.1801) <= 0.001;
  const bool height_ok = std::abs(height_ratio - 0.40164) <= 1e-4;
  c.pass = max_dev < 1e-12 && loc_ok && height_ok && y_monotone;
  c.detail = fmt("axis dev %.2g (< 1e-12), max at rho_x = %.5f (1.1801 +- 0.001), "
                 "height %.6f (0.40164 +- 1e-4), y-axis monotone: %s",
                 max_dev, best_r, height_ratio, y_monotone ? "yes" : "no");
  return c;
}

Criterion criterion_on_axis_null() {
  Criterion c{3, "on-axis injection transfers no energy"};
  const SimParams p = reference_params();
  const double w_init = (p.gamma0 - 1.0) * kElectronRestMeV;
  double worst = 0;
  for (const double z0 : {-21.0, -6.0, 2.0}) {
    const TrajectoryResult tr = integrate(derive_initial_state(p, 0, 0, z0), p);
    worst = std::max(worst, std::abs(tr.kinetic_energy_MeV - w_init));
  }
  c.pass = worst <= 1e-12;
  c.detail = fmt("max |dW| = %.3g MeV (<= 1e-12)", worst);
  return c;
}

Criterion criterion_conservation() {
  Criterion c{4, "q_minus, L_z and mass-shell closure conservation"};
  const SimParams p = reference_params();
  const TrajectoryResult tr = integrate(derive_initial_state(p, 0.02, 0.01, -6), p);
  const SimParams p0 = reference_params(0.0);
  const TrajectoryResult tr0 = integrate(derive_initial_state(p0, 0.012, 0.007, -6), p0);
  const double closure = std::max(tr.closure_residual_max, tr0.closure_residual_max);
  c.pass = tr.q_minus_drift == 0.0 && tr0.q_minus_drift == 0.0 &&
           std::abs(tr0.lz_drift) < 1e-8 && closure <= 1e-12;
  c.detail =
      fmt("q_minus drift %.1g (exact 0), |dL_z| %.3g (< 1e-8), closure %.3g (<= 1e-12)",
          std::abs(tr.q_minus_drift) + std::abs(tr0.q_minus_drift), std::abs(tr0.lz_drift),
          closure);
  return c;
}

Criterion criterion_energy_angle(const ScatterResult& scatter, const SimParams& p) {
  Criterion c{5, "energy-angle correlation of detected records"};
  double max_dev = 0;
  std::uint64_t n = 0;
  bool ring_ok = true;
  for (const auto& r : scatter.records) {
    if (!r.detected) continue;
    ++n;
    max_dev = std::max(max_dev, std::abs(r.theta - theta_closed_form(r.W_MeV, p.q_minus0)));
    const double radius = std::hypot(r.hit_x_cm, r.hit_y_cm);
    if (radius < p.detector.r1_cm || radius > p.detector.r2_cm) ring_ok = false;
  }
  const double theta1 = theta_closed_form(1.0, p.q_minus0) * 180.0 / kPi;
  const bool theta1_ok = std::abs(theta1 - 39.86) < 0.01 && theta1 > 37.63 && theta1 < 40.31 &&
                         std::abs(theta1 - 39.5) < 1.0;
  c.pass = n > 0 && max_dev < 1e-9 && theta1_ok && ring_ok;
  c.detail = fmt("%llu detected records, max |theta - theta(W, q-)| = %.3g rad (< 1e-9); "
                 "theta(1 MeV) = %.3f deg (39.86 +- 0.01, in [37.63, 40.31], within 1 of 39.5)",
                 static_cast<unsigned long long>(n), max_dev, theta1);
  return c;
}

Criterion criterion_isotropy() {
  Criterion c{6, "isotropy at mu = 0"};
  const SimParams p = reference_params(0.0);
  SamplingConfig cfg;
  cfg.target_total = 600000;
  cfg.seed = 0;
  RunClock clock;
  const ScatterResult result = run_scatter(p, cfg, 0.25, 8);
  const AngularDistribution dist = angular_histogram(result.records, 1.0, p.smoothing_deg);
  double lo = 1e300, hi = 0;
  for (const double v : dist.smoothed) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double max_min = hi / lo;
  std::string timing;
  const bool time_ok = runtime_within(clock, 120.0, &timing);
  c.pass = result.stats.sampled >= 200000 && max_min <= 1.15 && time_ok;
  c.detail = fmt("sampled %llu (>= 2e5), detected %llu, max/min = %.4f (<= 1.15); %s (<= 120 s)",
                 static_cast<unsigned long long>(result.stats.sampled),
                 static_cast<unsigned long long>(result.stats.detected), max_min, timing.c_str());
  return c;
}

Criterion criterion_anisotropy(ScatterResult* out_scatter, SimParams* out_params) {
  Criterion c{7, "anisotropy at mu = -1.55"};
  const SimParams p = reference_params();
  SamplingConfig cfg;
  cfg.target_total = 1000000;
  cfg.seed = 0;
  RunClock clock;
  ScatterResult result = run_scatter(p, cfg, 0.25, 8);
  const AngularDistribution dist = angular_histogram(result.records, 1.0, p.smoothing_deg);
  const double ratio = dist.value_at_deg(0.0) / dist.value_at_deg(90.0);
  std::string timing;
  const bool time_ok = runtime_within(clock, 600.0, &timing);
  c.pass = ratio >= 15.0 && ratio <= 60.0 && time_ok;
  c.detail = fmt("sampled %llu, detected %llu, n(0)/n(90) = %.2f (in [15, 60], point target 30); "
                 "%s (<= 600 s)",
                 static_cast<unsigned long long>(result.stats.sampled),
                 static_cast<unsigned long long>(result.stats.detected), ratio, timing.c_str());
  *out_scatter = std::move(result);
  *out_params = p;
  return c;
}

Criterion criterion_domain_geometry() {
  Criterion c{8, "injection-domain geometry"};
  const SimParams p = reference_params();
  SamplingConfig probe_cfg;

  int n_lo = 1000, n_hi = -1000;
  double max_thickness = 0;
  bool planes_inside = true;
  for (int n = -30; n <= 8; ++n) {
    const auto range = probe_detected_radius_range(p, n, probe_cfg, 0.25);
    if (!range) continue;
    if (n < -27 || n > 5) planes_inside = false;
    n_lo = std::min(n_lo, n);
    n_hi = std::max(n_hi, n);
    max_thickness = std::max(max_thickness, range->second - range->first);
  }
  const bool nonempty = n_hi >= n_lo;
  const double extent_R = nonempty ? static_cast<double>(n_hi - n_lo) : 0.0;
  const double L = p.rayleigh_over_R;
  const bool extent_ok = extent_R >= 0.3 * L && extent_R <= 1.5 * L;
  const bool thickness_ok = max_thickness < 0.5;

  // mu = 0 cross sections are annular: 90-degree rotation invariant masks
  const SimParams p0 = reference_params(0.0);
  bool annular = true;
  for (const int n : {-11, -6, -1}) {
    const auto range = probe_detected_radius_range(p0, n, probe_cfg, 0.25);
    if (!range) {
      annular = false;
      continue;
    }
    GridSpec grid;
    grid.nx = grid.ny = 41;
    const double half = std::min(2.0, range->second * 1.5);
    grid.x_min = grid.y_min = -half;
    grid.x_max = grid.y_max = half;
    const DomainMap map = domain_scan(n, grid, p0, 0.25, 8);
    int detected = 0;
    for (int ix = 0; ix < grid.nx; ++ix) {
      for (int iy = 0; iy < grid.ny; ++iy) {
        detected += map.cells[ix * grid.ny + iy].detected ? 1 : 0;
        if (map.cells[ix * grid.ny + iy].detected !=
            map.cells[(grid.nx - 1 - iy) * grid.ny + ix].detected) {
          annular = false;
        }
      }
    }
    if (detected == 0) annular = false;
  }

  c.pass = nonempty && planes_inside && extent_ok && thickness_ok && annular;
  c.detail = fmt("planes [%d, %d] (within [-27, 5]: %s), extent %.0f R = %.2f L "
                 "(in [0.3, 1.5] L), max radial thickness %.3f R (< 0.5), "
                 "mu=0 sections annular: %s",
                 n_lo, n_hi, planes_inside ? "yes" : "no", extent_R, extent_R / L,
                 max_thickness, annular ? "yes" : "no");
  return c;
}

Criterion criterion_mu_reflection() {
  Criterion c{9, "mu reflection maps trajectories exactly"};
  const SimParams pa = reference_params(-1.55);
  const SimParams pb = reference_params(1.55);
  double worst = 0;
  const std::vector<std::pair<double, double>> starts = {{0.012, 0.018}, {0.003, -0.025}};
  for (const auto& [x0, y0] : starts) {
    std::vector<PonderomotiveState> ta, tb;
    StepObserver oa = [&](const PonderomotiveState& s, double, double, double) {
      ta.push_back(s);
    };
    StepObserver ob = [&](const PonderomotiveState& s, double, double, double) {
      tb.push_back(s);
    };
    integrate(derive_initial_state(pa, x0, y0, -6), pa, 0.25, &oa);
    integrate(derive_initial_state(pb, y0, x0, -6), pb, 0.25, &ob);
    if (ta.size() != tb.size()) {
      c.detail = "step counts differ";
      return c;
    }
    for (std::size_t i = 0; i < ta.size(); ++i) {
      worst = std::max({worst, std::abs(ta[i].rho_x - tb[i].rho_y),
                        std::abs(ta[i].rho_y - tb[i].rho_x), std::abs(ta[i].q_x - tb[i].q_y),
                        std::abs(ta[i].q_y - tb[i].q_x), std::abs(ta[i].zeta - tb[i].zeta)});
    }
  }
  c.pass = worst <= 1e-12;
  c.detail = fmt("max per-step deviation under swap = %.3g (<= 1e-12)", worst);
  return c;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing:" + path.string() + ">";
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Criterion criterion_determinism() {
  Criterion c{10, "scatter output is byte-identical for 1 and 8 workers"};
  const fs::path base = fs::temp_directory_path() / "pondscat_acceptance_det";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string common = " scatter --planes=-7..-6 --target-total 600 --seed 42 --out ";
  const std::string run1 = std::string(PONDSCAT_CLI_PATH) + " --workers 1" + common +
                           (base / "w1").string() + " > /dev/null 2>&1";
  const std::string run8 = std::string(PONDSCAT_CLI_PATH) + " --workers 8" + common +
                           (base / "w8").string() + " > /dev/null 2>&1";
  if (std::system(run1.c_str()) != 0 || std::system(run8.c_str()) != 0) {
    c.detail = "CLI run failed";
    return c;
  }
  const bool records_same =
      slurp(base / "w1" / "records.csv") == slurp(base / "w8" / "records.csv");
  const bool hist_same =
      slurp(base / "w1" / "histogram.csv") == slurp(base / "w8" / "histogram.csv");
  c.pass = records_same && hist_same;
  c.detail = fmt("records identical: %s, histogram identical: %s",
                 records_same ? "yes" : "no", hist_same ? "yes" : "no");
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  results.push_back(criterion_gradient_fidelity());
  results.push_back(criterion_axis_closed_form());
  results.push_back(criterion_on_axis_null());
  results.push_back(criterion_conservation());

  ScatterResult anisotropy_run;
  SimParams anisotropy_params;
  Criterion c7 = criterion_anisotropy(&anisotropy_run, &anisotropy_params);
  results.push_back(criterion_energy_angle(anisotropy_run, anisotropy_params));
  anisotropy_run.records.clear();
  anisotropy_run.records.shrink_to_fit();
  results.push_back(criterion_isotropy());
  results.push_back(std::move(c7));
  results.push_back(criterion_domain_geometry());
  results.push_back(criterion_mu_reflection());
  results.push_back(criterion_determinism());

  std::sort(results.begin(), results.end(),
            [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %2d. %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
