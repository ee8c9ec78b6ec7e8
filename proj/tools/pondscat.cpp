// Command-line front end: parses configuration, dispatches the simulation
// commands, and serializes CSV outputs plus a run manifest per invocation.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pondscat/config_file.hpp"
#include "pondscat/experiment.hpp"
#include "pondscat/manifest.hpp"
#include "pondscat/output.hpp"
#include "pondscat/parallel.hpp"
#include "pondscat/version.hpp"

namespace fs = std::filesystem;
using namespace pondscat;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int workers = default_workers();
  double step = 0.25;
  std::optional<double> mu, a, eta0;
};

std::pair<int, int> parse_plane_range(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos) {
    throw ConfigError("plane range must be N1..N2, got '" + text + "'");
  }
  try {
    const int lo = std::stoi(text.substr(0, sep));
    const int hi = std::stoi(text.substr(sep + 2));
    if (lo > hi) throw ConfigError("plane range is empty: " + text);
    return {lo, hi};
  } catch (const std::invalid_argument&) {
    throw ConfigError("plane range must be N1..N2, got '" + text + "'");
  }
}

PhysicalConfig load_config(const GlobalOptions& g) {
  PhysicalConfig cfg;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    if (!in) throw ConfigError("cannot read config file " + g.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_config(buf.str());
  }
  // Flag precedence over file keys.
  if (g.mu) cfg.mu = *g.mu;
  if (g.a) {
    cfg.a = *g.a;
    cfg.eta0.reset();
  }
  if (g.eta0) {
    cfg.eta0 = *g.eta0;
    if (!g.a) cfg.a.reset();
  }
  if (g.a && g.eta0) {
    cfg.a = *g.a;
    cfg.eta0 = *g.eta0;  // derive_sim_params rejects the combination
  }
  return cfg;
}

std::string out_path(const GlobalOptions& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / name).string();
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void print_warnings(const SimParams& p) {
  for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
}

int run_potential_map(const GlobalOptions& g, const PhysicalConfig& cfg, int nx, int ny,
                      double extent, double z_over_R, double phi) {
  Timer timer;
  const SimParams p = derive_sim_params(cfg);
  print_warnings(p);
  GridSpec grid;
  grid.x_min = -extent;
  grid.x_max = extent;
  grid.y_min = -extent;
  grid.y_max = extent;
  grid.nx = nx;
  grid.ny = ny;
  grid.z_over_R = z_over_R;
  grid.phi = phi;
  const PotentialMap map = potential_map(grid, p);
  const std::string csv = out_path(g, "potential_map.csv");
  write_potential_csv(csv, map);

  RunManifest m;
  m.command = "potential-map";
  m.config = cfg;
  m.derived = p;
  m.seed = g.seed;
  m.workers = g.workers;
  m.step = g.step;
  m.outputs = {csv};
  m.extra = {{"nx", nx}, {"ny", ny}, {"extent", extent}, {"z_over_R", z_over_R}, {"phi", phi}};
  m.wall_seconds = timer.seconds();
  write_manifest(out_path(g, "manifest.json"), m);
  std::cout << "potential-map: " << nx << "x" << ny << " nodes -> " << csv << '\n';
  return 0;
}

int run_domain_map(const GlobalOptions& g, const PhysicalConfig& cfg,
                   const std::string& planes_text, int nodes, double extent) {
  Timer timer;
  const SimParams p = derive_sim_params(cfg);
  print_warnings(p);
  const auto [plane_lo, plane_hi] = parse_plane_range(planes_text);

  const std::string csv = out_path(g, "domain_map.csv");
  std::ofstream out(csv);
  if (!out) throw Error("cannot open " + csv);
  out << kDomainCsvHeader << '\n';

  SamplingConfig probe_cfg;
  probe_cfg.plane_min = plane_lo;
  probe_cfg.plane_max = plane_hi;
  std::uint64_t scan_traj = 0;
  std::uint64_t detected_nodes = 0, total_nodes = 0;
  for (int n = plane_lo; n <= plane_hi; ++n) {
    double half = extent;
    if (half <= 0) {
      // Auto-zoom: the detected set sits within a small radius that varies
      // by plane; an unzoomed grid would miss it entirely.
      const auto range = probe_detected_radius_range(p, n, probe_cfg, g.step, &scan_traj);
      half = range ? std::min(range->second * 1.5, probe_cfg.disc_radius_R) : 0.05;
    }
    GridSpec grid;
    grid.x_min = -half;
    grid.x_max = half;
    grid.y_min = -half;
    grid.y_max = half;
    grid.nx = nodes;
    grid.ny = nodes;
    const DomainMap map = domain_scan(n, grid, p, g.step, g.workers);
    write_domain_csv(out, map);
    total_nodes += map.cells.size();
    for (const auto& c : map.cells) detected_nodes += c.detected ? 1 : 0;
  }

  RunManifest m;
  m.command = "domain-map";
  m.config = cfg;
  m.derived = p;
  m.seed = g.seed;
  m.workers = g.workers;
  m.step = g.step;
  m.counts.sampled = total_nodes;
  m.counts.detected = detected_nodes;
  m.counts.scan_trajectories = scan_traj;
  m.outputs = {csv};
  m.extra = {{"planes", planes_text}, {"nodes", nodes}, {"extent", extent}};
  m.wall_seconds = timer.seconds();
  write_manifest(out_path(g, "manifest.json"), m);
  std::cout << "domain-map: " << detected_nodes << "/" << total_nodes
            << " nodes detected -> " << csv << '\n';
  return 0;
}

int run_scatter_cmd(const GlobalOptions& g, const PhysicalConfig& cfg,
                    const std::string& planes_text, std::optional<double> samples_per_plane,
                    std::optional<double> density, std::optional<double> target_total,
                    bool naive, double disc_radius, double bin_deg, std::uint64_t cap) {
  Timer timer;
  const SimParams p = derive_sim_params(cfg);
  print_warnings(p);

  SamplingConfig sampling;
  std::tie(sampling.plane_min, sampling.plane_max) = parse_plane_range(planes_text);
  sampling.samples_per_plane = samples_per_plane;
  sampling.density_per_R2 = density;
  sampling.target_total = target_total;
  sampling.naive = naive;
  sampling.disc_radius_R = disc_radius;
  sampling.seed = g.seed;
  sampling.total_cap = cap;

  const ScatterResult result = run_scatter(p, sampling, g.step, g.workers);
  const std::string records_csv = out_path(g, "records.csv");
  write_records_csv(records_csv, result.records);
  const AngularDistribution dist =
      angular_histogram(result.records, bin_deg, p.smoothing_deg);
  const std::string hist_csv = out_path(g, "histogram.csv");
  write_histogram_csv(hist_csv, dist);

  RunManifest m;
  m.command = "scatter";
  m.config = cfg;
  m.derived = p;
  m.seed = g.seed;
  m.workers = g.workers;
  m.step = g.step;
  m.counts = result.stats;
  m.outputs = {records_csv, hist_csv};
  m.extra = {{"planes", planes_text},
             {"naive", naive},
             {"disc_radius_R", disc_radius},
             {"bin_deg", bin_deg},
             {"cap", cap}};
  if (samples_per_plane) m.extra["samples_per_plane"] = *samples_per_plane;
  if (density) m.extra["density_per_R2"] = *density;
  if (target_total) m.extra["target_total"] = *target_total;
  m.wall_seconds = timer.seconds();
  write_manifest(out_path(g, "manifest.json"), m);
  std::cout << "scatter: sampled " << result.stats.sampled << ", detected "
            << result.stats.detected << ", failed " << result.stats.failed << " ("
            << result.stats.scan_trajectories << " scan trajectories) -> " << records_csv
            << '\n';
  return 0;
}

int run_trajectory(const GlobalOptions& g, const PhysicalConfig& cfg, double x0, double y0,
                   double z0, int dump_every) {
  Timer timer;
  const SimParams p = derive_sim_params(cfg);
  print_warnings(p);
  const std::string csv = out_path(g, "trajectory.csv");
  TrajectoryCsv dump(csv);
  long row = 0;
  StepObserver obs = [&](const PonderomotiveState& st, double U, double q_z, double q_0) {
    if (row++ % dump_every == 0) dump.row(st, U, q_z, q_0);
  };
  const TrajectoryResult tr = integrate(derive_initial_state(p, x0, y0, z0), p, g.step, &obs);

  RunManifest m;
  m.command = "trajectory";
  m.config = cfg;
  m.derived = p;
  m.seed = g.seed;
  m.workers = g.workers;
  m.step = g.step;
  m.counts.sampled = 1;
  m.outputs = {csv};
  m.extra = {{"x0", x0},
             {"y0", y0},
             {"z0", z0},
             {"dump_every", dump_every},
             {"W_MeV", tr.kinetic_energy_MeV},
             {"theta_rad", tr.polar_angle},
             {"steps", tr.step_count}};
  m.wall_seconds = timer.seconds();
  write_manifest(out_path(g, "manifest.json"), m);
  std::cout << "trajectory: W = " << tr.kinetic_energy_MeV << " MeV, theta = "
            << tr.polar_angle * 180.0 / 3.14159265358979323846 << " deg, " << tr.step_count
            << " steps -> " << csv << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pondscat: relativistic ponderomotive scattering of electrons by a "
               "focused laser pulse"};
  app.set_version_flag("--version", std::string("pondscat ") + kVersion);
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key = value config file");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--workers", g.workers, "worker thread count")->capture_default_str();
  app.add_option("--step", g.step, "RK4 phase step")->capture_default_str();
  double mu_flag = 0, a_flag = 0, eta0_flag = 0;
  auto* mu_opt = app.add_option("--mu", mu_flag, "asymmetry parameter override");
  auto* a_opt = app.add_option("--a", a_flag, "field amplitude a override");
  auto* eta0_opt = app.add_option("--eta0", eta0_flag, "eta0 override");

  auto* pm = app.add_subcommand("potential-map", "sample the ponderomotive potential on a grid");
  pm->fallthrough();
  int pm_nx = 201, pm_ny = 201;
  double pm_extent = 2.0, pm_z = 0.0, pm_phi = 0.0;
  pm->add_option("--nx", pm_nx)->capture_default_str();
  pm->add_option("--ny", pm_ny)->capture_default_str();
  pm->add_option("--extent", pm_extent, "grid covers [-extent, extent]^2 in units of R")
      ->capture_default_str();
  pm->add_option("--z-over-R", pm_z, "plane position z/R")->capture_default_str();
  pm->add_option("--phi", pm_phi, "phase at which to evaluate")->capture_default_str();

  auto* dm = app.add_subcommand("domain-map", "classify injection positions per plane");
  dm->fallthrough();
  std::string dm_planes = "-27..5";
  int dm_nodes = 81;
  double dm_extent = 0.0;
  dm->add_option("--planes", dm_planes, "plane range N1..N2")->capture_default_str();
  dm->add_option("--nodes", dm_nodes, "grid nodes per axis")->capture_default_str();
  dm->add_option("--extent", dm_extent, "half-extent in R (0 = auto-zoom per plane)")
      ->capture_default_str();

  auto* sc = app.add_subcommand("scatter", "Monte Carlo ensemble and angular distribution");
  sc->fallthrough();
  std::string sc_planes = "-27..5";
  double sc_spp = 0, sc_density = 0, sc_target = 0;
  bool sc_naive = false;
  double sc_disc = 2.0, sc_bin = 1.0;
  std::uint64_t sc_cap = 100000000;
  sc->add_option("--planes", sc_planes, "plane range N1..N2")->capture_default_str();
  auto* spp_opt = sc->add_option("--samples-per-plane", sc_spp,
                                 "full-disc-equivalent samples per plane (default 30000)");
  auto* dens_opt = sc->add_option("--density", sc_density, "sampling density per R^2");
  auto* target_opt =
      sc->add_option("--target-total", sc_target, "rescale density to this sampled total");
  sc->add_flag("--naive-sampling", sc_naive, "sample the full disc (no importance region)");
  sc->add_option("--disc-radius", sc_disc, "sampling disc radius in R")->capture_default_str();
  sc->add_option("--bin-deg", sc_bin, "histogram bin width in degrees")->capture_default_str();
  sc->add_option("--cap", sc_cap, "hard cap on sampled trajectories")->capture_default_str();

  auto* tj = app.add_subcommand("trajectory", "integrate and dump a single trajectory");
  tj->fallthrough();
  double tj_x0 = 0.01, tj_y0 = 0.0, tj_z0 = -6.0;
  int tj_dump = 1;
  tj->add_option("--x0", tj_x0, "injection x in R")->capture_default_str();
  tj->add_option("--y0", tj_y0, "injection y in R")->capture_default_str();
  tj->add_option("--z0", tj_z0, "injection z in R")->capture_default_str();
  tj->add_option("--dump-every", tj_dump, "keep every Nth step")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*mu_opt) g.mu = mu_flag;
    if (*a_opt) g.a = a_flag;
    if (*eta0_opt) g.eta0 = eta0_flag;
    const PhysicalConfig cfg = load_config(g);
    if (pm->parsed()) return run_potential_map(g, cfg, pm_nx, pm_ny, pm_extent, pm_z, pm_phi);
    if (dm->parsed()) return run_domain_map(g, cfg, dm_planes, dm_nodes, dm_extent);
    if (sc->parsed()) {
      return run_scatter_cmd(g, cfg, sc_planes,
                             *spp_opt ? std::optional<double>(sc_spp) : std::nullopt,
                             *dens_opt ? std::optional<double>(sc_density) : std::nullopt,
                             *target_opt ? std::optional<double>(sc_target) : std::nullopt,
                             sc_naive, sc_disc, sc_bin, sc_cap);
    }
    if (tj->parsed()) return run_trajectory(g, cfg, tj_x0, tj_y0, tj_z0, tj_dump);
    std::cerr << "error: no command\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
