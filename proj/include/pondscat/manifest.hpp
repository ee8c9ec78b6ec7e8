#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pondscat/experiment.hpp"
#include "pondscat/params.hpp"
#include "pondscat/sampling.hpp"
#include "pondscat/version.hpp"

namespace pondscat {

/// Everything needed to reproduce a run bit for bit, plus bookkeeping.
struct RunManifest {
  std::string command;
  PhysicalConfig config;
  SimParams derived;
  std::uint64_t seed = 0;
  int workers = 0;
  double step = 0.25;
  ScatterStats counts;
  std::vector<std::string> outputs;
  double wall_seconds = 0;
  nlohmann::json extra;  // per-command settings (grid, planes, sampling, ...)
};

inline nlohmann::json config_to_json(const PhysicalConfig& cfg) {
  nlohmann::json j;
  j["lambda_um"] = cfg.lambda_um;
  j["R_um"] = cfg.focal_radius_um;
  j["omega_tau"] = cfg.omega_tau;
  if (cfg.a) j["a"] = *cfg.a;
  if (cfg.eta0) j["eta0"] = *cfg.eta0;
  j["mu"] = cfg.mu;
  j["electron_keV"] = cfg.electron_keV;
  j["detector_z_cm"] = cfg.detector_z_cm;
  j["detector_r1_cm"] = cfg.detector_r1_cm;
  j["detector_r2_cm"] = cfg.detector_r2_cm;
  j["W_threshold_MeV"] = cfg.w_threshold_MeV;
  j["smoothing_deg"] = cfg.smoothing_deg;
  j["envelope"] = cfg.envelope == EnvelopeKind::Sin2 ? "sin2" : "none";
  return j;
}

inline PhysicalConfig config_from_json(const nlohmann::json& j) {
  PhysicalConfig cfg;
  cfg.lambda_um = j.at("lambda_um").get<double>();
  cfg.focal_radius_um = j.at("R_um").get<double>();
  cfg.omega_tau = j.at("omega_tau").get<double>();
  if (j.contains("a")) cfg.a = j.at("a").get<double>();
  if (j.contains("eta0")) cfg.eta0 = j.at("eta0").get<double>();
  cfg.mu = j.at("mu").get<double>();
  cfg.electron_keV = j.at("electron_keV").get<double>();
  cfg.detector_z_cm = j.at("detector_z_cm").get<double>();
  cfg.detector_r1_cm = j.at("detector_r1_cm").get<double>();
  cfg.detector_r2_cm = j.at("detector_r2_cm").get<double>();
  cfg.w_threshold_MeV = j.at("W_threshold_MeV").get<double>();
  cfg.smoothing_deg = j.at("smoothing_deg").get<double>();
  cfg.envelope =
      j.at("envelope").get<std::string>() == "none" ? EnvelopeKind::None : EnvelopeKind::Sin2;
  return cfg;
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["workers"] = m.workers;
  j["step"] = m.step;
  j["config"] = config_to_json(m.config);
  nlohmann::json d;
  d["delta"] = m.derived.delta;
  d["delta_prime"] = m.derived.delta_prime;
  d["eta0"] = m.derived.eta0;
  d["mu"] = m.derived.mu;
  d["omega_tau"] = m.derived.omega_tau;
  d["phase_half_span"] = m.derived.phase_half_span;
  d["gamma0"] = m.derived.gamma0;
  d["beta0"] = m.derived.beta0;
  d["q_minus0"] = m.derived.q_minus0;
  d["rayleigh_over_R"] = m.derived.rayleigh_over_R;
  d["detector_z_R"] = m.derived.detector.z_R;
  d["detector_r1_R"] = m.derived.detector.r1_R;
  d["detector_r2_R"] = m.derived.detector.r2_R;
  d["warnings"] = m.derived.warnings;
  j["derived"] = d;
  nlohmann::json c;
  c["sampled"] = m.counts.sampled;
  c["detected"] = m.counts.detected;
  c["failed"] = m.counts.failed;
  c["scan_trajectories"] = m.counts.scan_trajectories;
  c["region_area_R2"] = m.counts.region_area_R2;
  c["density_per_R2"] = m.counts.density_per_R2;
  j["counts"] = c;
  j["outputs"] = m.outputs;
  j["wall_seconds"] = m.wall_seconds;
  if (!m.extra.is_null()) j["run"] = m.extra;
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace pondscat
