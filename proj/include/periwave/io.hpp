// SPDX-License-Identifier: Apache-2.0
//
// Run artifacts: convergence CSV, run manifest, raw field snapshots with a
// JSON sidecar, and an optional legacy-VTK export per dof family. Numeric
// text output uses max_digits10 round-trip formatting; all writes go through
// a temp-then-rename so readers never observe partial files.

#pragma once

#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "periwave/config.hpp"

namespace periwave {

inline void write_snapshot_vtk(const std::filesystem::path& dir, const std::string& name,
                               const FieldState& u, const DofLayout& L);

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// Fixed-column convergence log. Everything except wall_seconds is a
/// deterministic function of config + version.
inline std::string convergence_csv(const std::vector<IterationRecord>& history) {
  std::ostringstream os;
  os << "iter,rho,sqrt_rho_rel,functional_F,period_solves,wall_seconds\n";
  for (const auto& r : history)
    os << r.iter << ',' << format_double(r.rho) << ',' << format_double(r.sqrt_rho_rel)
       << ',' << format_double(r.functional) << ',' << r.period_solves << ','
       << format_double(r.wall_seconds) << '\n';
  return os.str();
}

inline constexpr const char* kArtifactVersion = "1.0.0";

struct AnalyticComparison {
  bool present = false;
  std::string reference;
  double l2_rel = 0.0, max_rel = 0.0;
};

/// Self-describing record of one run: the full config is embedded, so the
/// manifest alone reproduces the run.
struct RunManifest {
  ScenarioConfig config;
  std::string status;  // converged | iteration_cap | instability | stagnated | config_error
  int failing_step = -1;  // instability only
  std::vector<IterationRecord> history;
  double final_functional = 0.0;
  double final_sqrt_rho_rel = 0.0;
  std::size_t dof_count = 0;
  int steps_per_period = 0;
  std::string started_at, finished_at;
  AnalyticComparison analytic;

  Json to_json() const {
    Json j;
    j["artifact_version"] = kArtifactVersion;
    j["config"] = config.serialize();
    j["config_hash"] = config.hash();
    j["status"] = status;
    if (failing_step >= 0) j["failing_step"] = failing_step;
    j["dof_count"] = dof_count;
    j["steps_per_period"] = steps_per_period;
    j["final_functional"] = final_functional;
    j["final_sqrt_rho_rel"] = final_sqrt_rho_rel;
    j["iterations"] = history.empty() ? 0 : history.back().iter;
    j["period_solves"] = history.empty() ? 0 : history.back().period_solves;
    Json recs = Json::array();
    for (const auto& r : history) {
      Json rj;
      rj["iter"] = r.iter;
      rj["rho"] = r.rho;
      rj["sqrt_rho_rel"] = r.sqrt_rho_rel;
      rj["functional_F"] = r.functional;
      rj["period_solves"] = r.period_solves;
      rj["wall_seconds"] = r.wall_seconds;
      recs.push_back(rj);
    }
    j["convergence"] = recs;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    if (analytic.present) {
      j["analytic_error"]["reference"] = analytic.reference;
      j["analytic_error"]["l2_rel"] = analytic.l2_rel;
      j["analytic_error"]["max_rel"] = analytic.max_rel;
    }
    return j;
  }
};

inline std::string iso_timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// --- snapshots ------------------------------------------------------------

/// Raw snapshot: little-endian f64 dof values, E block then H block, in
/// layout order, plus a JSON sidecar describing the layout.
inline void write_snapshot(const std::filesystem::path& dir, const std::string& name,
                           const FieldState& u, const DofLayout& L,
                           const std::string& config_hash, double sim_time,
                           bool vtk = false) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  static_assert(sizeof(double) == 8);

  std::string raw;
  raw.resize(8 * (u.e.size() + u.h.size()));
  std::memcpy(raw.data(), u.e.data(), 8 * u.e.size());
  std::memcpy(raw.data() + 8 * u.e.size(), u.h.data(), 8 * u.h.size());
  write_file_atomic(dir / (name + ".f64"), raw);

  Json side;
  side["artifact_version"] = kArtifactVersion;
  side["config_hash"] = config_hash;
  side["system"] = to_string(L.grid.system);
  side["dimension"] = L.grid.dimension;
  side["cells"] = {L.grid.cells[0], L.grid.cells[1], L.grid.cells[2]};
  side["spacing"] = {L.grid.spacing[0], L.grid.spacing[1], L.grid.spacing[2]};
  side["origin"] = {L.grid.origin[0], L.grid.origin[1], L.grid.origin[2]};
  side["sim_time"] = sim_time;
  side["byte_order"] = "little_endian";
  side["scalar"] = "f64";
  side["e_count"] = L.e_count;
  side["h_count"] = L.h_count;
  auto families = [](const std::vector<FormFamily>& fams) {
    Json arr = Json::array();
    for (const auto& f : fams) {
      Json fj;
      fj["axes_mask"] = f.axes_mask;
      fj["size"] = {f.size[0], f.size[1], f.size[2]};
      fj["offset"] = f.offset;
      arr.push_back(fj);
    }
    return arr;
  };
  side["e_families"] = families(L.e_families);
  side["h_families"] = families(L.h_families);
  write_file_atomic(dir / (name + ".json"), side.dump(2) + "\n");

  if (vtk) write_snapshot_vtk(dir, name, u, L);
}

inline FieldState read_snapshot(const std::filesystem::path& dir, const std::string& name,
                                const DofLayout& L) {
  std::ifstream in(dir / (name + ".f64"), std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot " + (dir / name).string());
  FieldState u(L);
  in.read(reinterpret_cast<char*>(u.e.data()), static_cast<std::streamsize>(8 * u.e.size()));
  in.read(reinterpret_cast<char*>(u.h.data()), static_cast<std::streamsize>(8 * u.h.size()));
  if (!in) throw std::runtime_error("snapshot too short: " + (dir / name).string());
  return u;
}

/// One legacy-VTK structured-points file per dof family (staggered families
/// get a half-spacing origin offset), for external viewers.
inline void write_snapshot_vtk(const std::filesystem::path& dir, const std::string& name,
                               const FieldState& u, const DofLayout& L) {
  auto emit = [&](const FormFamily& f, const std::vector<double>& vals,
                  const std::string& tag, std::size_t fi) {
    std::ostringstream os;
    os << "# vtk DataFile Version 3.0\n"
       << name << " " << tag << fi << "\nASCII\nDATASET STRUCTURED_POINTS\n"
       << "DIMENSIONS " << f.size[2] << " " << f.size[1] << " " << f.size[0] << "\n"
       << "ORIGIN";
    for (int a = 2; a >= 0; --a)
      os << " " << format_double(L.grid.origin[a] +
                                 (f.staggered(a) ? 0.5 * L.grid.spacing[a] : 0.0));
    os << "\nSPACING";
    for (int a = 2; a >= 0; --a) os << " " << format_double(L.grid.spacing[a]);
    os << "\nPOINT_DATA " << f.count() << "\nSCALARS " << tag << fi
       << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < f.count(); ++i)
      os << format_double(vals[f.offset + i]) << "\n";
    write_file_atomic(dir / (name + "_" + tag + std::to_string(fi) + ".vtk"), os.str());
  };
  for (std::size_t fi = 0; fi < L.e_families.size(); ++fi)
    emit(L.e_families[fi], u.e, "E", fi);
  for (std::size_t fi = 0; fi < L.h_families.size(); ++fi)
    emit(L.h_families[fi], u.h, "H", fi);
}

}  // namespace periwave
