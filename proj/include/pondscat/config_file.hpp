#pragma once

#include <cstdlib>
#include <string>
#include <string_view>

#include "pondscat/params.hpp"

namespace pondscat {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline double parse_number(std::string_view value, int line) {
  const std::string text(value);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw ParseError("config line " + std::to_string(line) + ": not a number: '" + text + "'");
  }
  return v;
}

}  // namespace detail

/// Line-oriented `key = value` config with `#` comments. Unknown keys are
/// errors; every key is optional and defaults to the reference setup.
inline PhysicalConfig parse_config(std::string_view text) {
  PhysicalConfig cfg;
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line;

    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;

    const std::size_t eq = raw.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key(detail::trim(raw.substr(0, eq)));
    const std::string_view value = detail::trim(raw.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError("config line " + std::to_string(line) + ": expected key = value");
    }

    if (key == "lambda_um") {
      cfg.lambda_um = detail::parse_number(value, line);
    } else if (key == "R_um") {
      cfg.focal_radius_um = detail::parse_number(value, line);
    } else if (key == "omega_tau") {
      cfg.omega_tau = detail::parse_number(value, line);
    } else if (key == "a") {
      cfg.a = detail::parse_number(value, line);
    } else if (key == "eta0") {
      cfg.eta0 = detail::parse_number(value, line);
    } else if (key == "mu") {
      cfg.mu = detail::parse_number(value, line);
    } else if (key == "electron_keV") {
      cfg.electron_keV = detail::parse_number(value, line);
    } else if (key == "detector_z_cm") {
      cfg.detector_z_cm = detail::parse_number(value, line);
    } else if (key == "detector_r1_cm") {
      cfg.detector_r1_cm = detail::parse_number(value, line);
    } else if (key == "detector_r2_cm") {
      cfg.detector_r2_cm = detail::parse_number(value, line);
    } else if (key == "W_threshold_MeV") {
      cfg.w_threshold_MeV = detail::parse_number(value, line);
    } else if (key == "smoothing_deg") {
      cfg.smoothing_deg = detail::parse_number(value, line);
    } else if (key == "envelope") {
      if (value == "sin2") {
        cfg.envelope = EnvelopeKind::Sin2;
      } else if (value == "none") {
        cfg.envelope = EnvelopeKind::None;
      } else {
        throw ParseError("config line " + std::to_string(line) +
                         ": envelope must be sin2 or none");
      }
    } else {
      throw ParseError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace pondscat
