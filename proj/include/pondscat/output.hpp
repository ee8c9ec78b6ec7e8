#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "pondscat/dynamics.hpp"
#include "pondscat/experiment.hpp"

namespace pondscat {

/// Fixed numeric formatting for all CSV output: 17 significant digits
/// round-trips doubles exactly, so files are platform-stable.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_potential_csv(const std::string& path, const PotentialMap& map) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << "x_over_R,y_over_R,U_MeV\n";
  for (int ix = 0; ix < map.grid.nx; ++ix) {
    for (int iy = 0; iy < map.grid.ny; ++iy) {
      out << g17(map.grid.x_at(ix)) << ',' << g17(map.grid.y_at(iy)) << ','
          << g17(map.U[static_cast<std::size_t>(ix) * map.grid.ny + iy] * kElectronRestMeV)
          << '\n';
    }
  }
}

inline void write_domain_csv(std::ofstream& out, const DomainMap& map) {
  constexpr double kDeg = 180.0 / 3.14159265358979323846;
  for (int ix = 0; ix < map.grid.nx; ++ix) {
    for (int iy = 0; iy < map.grid.ny; ++iy) {
      const DomainCell& c = map.cells[static_cast<std::size_t>(ix) * map.grid.ny + iy];
      out << map.plane_n << ',' << g17(map.grid.x_at(ix)) << ',' << g17(map.grid.y_at(iy))
          << ',' << (c.detected ? 1 : 0) << ',' << g17(c.W_MeV) << ',' << g17(c.alpha * kDeg)
          << '\n';
    }
  }
}

inline const char* kDomainCsvHeader = "n,x_over_R,y_over_R,detected,W_MeV,alpha_deg";

inline void write_records_csv(const std::string& path,
                              const std::vector<ScatterRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  constexpr double kDeg = 180.0 / 3.14159265358979323846;
  out << "plane_n,x0_over_R,y0_over_R,W_MeV,theta_deg,alpha_deg,X_cm,Y_cm,detected\n";
  for (const auto& r : records) {
    out << r.plane_n << ',' << g17(r.x0) << ',' << g17(r.y0) << ',' << g17(r.W_MeV) << ','
        << g17(r.theta * kDeg) << ',' << g17(r.alpha * kDeg) << ',' << g17(r.hit_x_cm) << ','
        << g17(r.hit_y_cm) << ',' << (r.detected ? 1 : 0) << '\n';
  }
}

inline void write_histogram_csv(const std::string& path, const AngularDistribution& dist) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << "alpha_deg,count,n_smoothed\n";
  for (std::size_t k = 0; k < dist.centers_deg.size(); ++k) {
    out << g17(dist.centers_deg[k]) << ',' << dist.counts[k] << ',' << g17(dist.smoothed[k])
        << '\n';
  }
}

/// Per-step trajectory dump; the observer wiring lives at the call site.
struct TrajectoryCsv {
  std::ofstream out;
  explicit TrajectoryCsv(const std::string& path) : out(path) {
    if (!out) throw Error("cannot open " + path);
    out << "phi,rho_x,rho_y,zeta,q_x,q_y,q_z,q0,U\n";
  }
  void row(const PonderomotiveState& st, double U, double q_z, double q_0) {
    out << g17(st.phi) << ',' << g17(st.rho_x) << ',' << g17(st.rho_y) << ',' << g17(st.zeta)
        << ',' << g17(st.q_x) << ',' << g17(st.q_y) << ',' << g17(q_z) << ',' << g17(q_0)
        << ',' << g17(U) << '\n';
  }
};

}  // namespace pondscat
