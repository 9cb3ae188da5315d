// SPDX-License-Identifier: Apache-2.0
//
// JSON run configuration: parsing with path-qualified error messages,
// canonical re-serialization (round-trip fixed point), a content hash, and
// the translation into a Discretization / Scenario / ControlConfig triple.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "periwave/analytic.hpp"
#include "periwave/control.hpp"
#include "periwave/evolution.hpp"

namespace periwave {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error("config error at " + path + ": " + what) {}
};

struct MaterialRegion {
  std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
  double eps = 1.0, mu = 1.0;
};

/// Everything a run needs, mirrored one-to-one onto the JSON schema.
struct ScenarioConfig {
  GridSpec grid;
  std::array<FaceCondition, 6> face_bc{FaceCondition::Dirichlet, FaceCondition::Dirichlet,
                                       FaceCondition::Dirichlet, FaceCondition::Dirichlet,
                                       FaceCondition::Dirichlet, FaceCondition::Dirichlet};
  double eps = 1.0, mu = 1.0;
  std::vector<MaterialRegion> regions;
  Obstacle obstacle;

  // drive
  std::string drive_profile = "none";  // none | scatterer_uniform | traveling_wave | radiation_sphere
  std::complex<double> drive_amplitude{1.0, 0.0};
  std::string source_profile = "none";  // none | e_uniform
  std::complex<double> source_amplitude{0.0, 0.0};

  ControlConfig control;
  double cfl_factor = 0.0;  // > 0: derive steps_per_period from the CFL bound

  // output
  int snapshot_cadence = 0;  // CG iterations between snapshots; 0 = final only
  bool write_vtk = false;

  // --- parsing -----------------------------------------------------------

  static ScenarioConfig parse(const Json& j) {
    ScenarioConfig c;
    const Json& g = require(j, "grid", "$");
    c.grid.dimension = get<int>(g, "dimension", "$.grid");
    c.grid.system = parse_system(get<std::string>(g, "system", "$.grid"), "$.grid.system");
    read_axis_array(g, "cells", c.grid.cells, c.grid.dimension, "$.grid", 1);
    read_axis_array(g, "spacing", c.grid.spacing, c.grid.dimension, "$.grid", 1.0);
    if (g.contains("origin"))
      read_axis_array(g, "origin", c.grid.origin, c.grid.dimension, "$.grid", 0.0);
    try {
      c.grid.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("$.grid", e.what());
    }

    const Json& b = require(j, "boundary", "$");
    const Json& faces = require(b, "faces", "$.boundary");
    if (!faces.is_array() || static_cast<int>(faces.size()) != 2 * c.grid.dimension)
      throw ConfigError("$.boundary.faces",
                        "expected " + std::to_string(2 * c.grid.dimension) + " entries");
    for (int f = 0; f < 2 * c.grid.dimension; ++f)
      c.face_bc[f] = parse_face_condition(faces[f].get<std::string>(),
                                          "$.boundary.faces[" + std::to_string(f) + "]");

    if (j.contains("material")) {
      const Json& m = j.at("material");
      c.eps = m.value("eps", 1.0);
      c.mu = m.value("mu", 1.0);
      if (!(c.eps > 0.0)) throw ConfigError("$.material.eps", "must be positive");
      if (!(c.mu > 0.0)) throw ConfigError("$.material.mu", "must be positive");
      if (m.contains("regions")) {
        int ri = 0;
        for (const Json& r : m.at("regions")) {
          const std::string p = "$.material.regions[" + std::to_string(ri++) + "]";
          MaterialRegion reg;
          read_axis_array(r, "lo", reg.lo, c.grid.dimension, p, 0.0);
          read_axis_array(r, "hi", reg.hi, c.grid.dimension, p, 0.0);
          reg.eps = r.value("eps", c.eps);
          reg.mu = r.value("mu", c.mu);
          if (!(reg.eps > 0.0)) throw ConfigError(p + ".eps", "must be positive");
          if (!(reg.mu > 0.0)) throw ConfigError(p + ".mu", "must be positive");
          c.regions.push_back(reg);
        }
      }
    }

    if (j.contains("obstacle")) {
      const Json& o = j.at("obstacle");
      const std::string shape = o.value("shape", "none");
      if (shape == "none") {
      } else if (shape == "box") {
        c.obstacle.shape = Obstacle::Shape::Box;
        read_axis_array(o, "lo", c.obstacle.lo, c.grid.dimension, "$.obstacle", 0.0);
        read_axis_array(o, "hi", c.obstacle.hi, c.grid.dimension, "$.obstacle", 0.0);
      } else if (shape == "ball") {
        c.obstacle.shape = Obstacle::Shape::Ball;
        read_axis_array(o, "center", c.obstacle.center, c.grid.dimension, "$.obstacle", 0.0);
        c.obstacle.radius = get<double>(o, "radius", "$.obstacle");
        if (!(c.obstacle.radius > 0.0)) throw ConfigError("$.obstacle.radius", "must be positive");
      } else {
        throw ConfigError("$.obstacle.shape", "unknown shape '" + shape + "'");
      }
    }

    const Json& d = require(j, "drive", "$");
    c.control.omega = get<double>(d, "omega", "$.drive");
    if (!(c.control.omega > 0.0))
      throw ConfigError("$.drive.omega", "must be positive (degenerate period)");
    c.drive_profile = d.value("profile", std::string("none"));
    if (c.drive_profile != "none" && c.drive_profile != "scatterer_uniform" &&
        c.drive_profile != "traveling_wave" && c.drive_profile != "radiation_sphere")
      throw ConfigError("$.drive.profile", "unknown profile '" + c.drive_profile + "'");
    c.drive_amplitude = read_complex(d, "amplitude", "$.drive", {1.0, 0.0});
    if (d.contains("source")) {
      const Json& s = d.at("source");
      c.source_profile = s.value("type", std::string("none"));
      if (c.source_profile != "none" && c.source_profile != "e_uniform")
        throw ConfigError("$.drive.source.type", "unknown source '" + c.source_profile + "'");
      c.source_amplitude = read_complex(s, "amplitude", "$.drive.source", {0.0, 0.0});
    }

    const Json& ct = require(j, "control", "$");
    c.control.steps_per_period = ct.value("steps_per_period", 64);
    c.control.rel_tolerance = ct.value("tol", 1e-10);
    c.control.max_iterations = ct.value("max_iter", 500);
    c.control.warm_start_periods = ct.value("warm_start_periods", 0);
    c.control.ramp_warm_start = ct.value("ramp_warm_start", true);
    c.cfl_factor = ct.value("cfl_factor", 0.0);
    const std::string av = ct.value("adjoint_variant", std::string("forward"));
    if (av == "forward")
      c.control.adjoint_variant = AdjointVariant::Forward;
    else if (av == "backward")
      c.control.adjoint_variant = AdjointVariant::Backward;
    else
      throw ConfigError("$.control.adjoint_variant", "expected 'forward' or 'backward'");
    try {
      c.control.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("$.control", e.what());
    }

    if (j.contains("output")) {
      const Json& o = j.at("output");
      c.snapshot_cadence = o.value("snapshot_cadence", 0);
      c.write_vtk = o.value("vtk", false);
      if (c.snapshot_cadence < 0) throw ConfigError("$.output.snapshot_cadence", "must be >= 0");
    }
    return c;
  }

  static ScenarioConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open '" + path + "'");
    Json j;
    try {
      in >> j;
    } catch (const Json::parse_error& e) {
      throw ConfigError("$", std::string("not valid JSON: ") + e.what());
    }
    return parse(j);
  }

  /// Canonical serialization: parse(serialize(c)) == c and the text is a
  /// deterministic function of the values (sorted keys).
  Json serialize() const {
    Json j;
    j["grid"]["dimension"] = grid.dimension;
    j["grid"]["system"] = to_string(grid.system);
    j["grid"]["cells"] = axis_array(grid.cells, grid.dimension);
    j["grid"]["spacing"] = axis_array(grid.spacing, grid.dimension);
    j["grid"]["origin"] = axis_array(grid.origin, grid.dimension);
    Json faces = Json::array();
    for (int f = 0; f < 2 * grid.dimension; ++f) faces.push_back(to_string(face_bc[f]));
    j["boundary"]["faces"] = faces;
    j["material"]["eps"] = eps;
    j["material"]["mu"] = mu;
    if (!regions.empty()) {
      Json rs = Json::array();
      for (const auto& r : regions) {
        Json rj;
        rj["lo"] = axis_array(r.lo, grid.dimension);
        rj["hi"] = axis_array(r.hi, grid.dimension);
        rj["eps"] = r.eps;
        rj["mu"] = r.mu;
        rs.push_back(rj);
      }
      j["material"]["regions"] = rs;
    }
    switch (obstacle.shape) {
      case Obstacle::Shape::None:
        j["obstacle"]["shape"] = "none";
        break;
      case Obstacle::Shape::Box:
        j["obstacle"]["shape"] = "box";
        j["obstacle"]["lo"] = axis_array(obstacle.lo, grid.dimension);
        j["obstacle"]["hi"] = axis_array(obstacle.hi, grid.dimension);
        break;
      case Obstacle::Shape::Ball:
        j["obstacle"]["shape"] = "ball";
        j["obstacle"]["center"] = axis_array(obstacle.center, grid.dimension);
        j["obstacle"]["radius"] = obstacle.radius;
        break;
    }
    j["drive"]["omega"] = control.omega;
    j["drive"]["profile"] = drive_profile;
    j["drive"]["amplitude"] = {drive_amplitude.real(), drive_amplitude.imag()};
    j["drive"]["source"]["type"] = source_profile;
    j["drive"]["source"]["amplitude"] = {source_amplitude.real(), source_amplitude.imag()};
    j["control"]["steps_per_period"] = control.steps_per_period;
    j["control"]["tol"] = control.rel_tolerance;
    j["control"]["max_iter"] = control.max_iterations;
    j["control"]["adjoint_variant"] =
        control.adjoint_variant == AdjointVariant::Forward ? "forward" : "backward";
    j["control"]["warm_start_periods"] = control.warm_start_periods;
    j["control"]["ramp_warm_start"] = control.ramp_warm_start;
    j["control"]["cfl_factor"] = cfl_factor;
    j["output"]["snapshot_cadence"] = snapshot_cadence;
    j["output"]["vtk"] = write_vtk;
    return j;
  }

  /// FNV-1a over the canonical serialization.
  std::string hash() const {
    const std::string s = serialize().dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
  }

  // --- realization -------------------------------------------------------

  MaterialModel material_model() const {
    MaterialModel m;
    const double e0 = eps, m0 = mu;
    const auto regs = regions;
    const int dim = grid.dimension;
    m.eps = [e0, regs, dim](const std::array<double, 3>& x) {
      double v = e0;
      for (const auto& r : regs)
        if (region_contains(r, x, dim)) v = r.eps;
      return v;
    };
    m.mu = [m0, regs, dim](const std::array<double, 3>& x) {
      double v = m0;
      for (const auto& r : regs)
        if (region_contains(r, x, dim)) v = r.mu;
      return v;
    };
    return m;
  }

  Discretization build_discretization() const {
    return Discretization::build(grid, face_bc, material_model(), obstacle);
  }

  /// Time grid honoring steps_per_period, or the CFL bound when cfl_factor
  /// is set (steps rounded up to a multiple of 4 for harmonic extraction).
  TimeGrid build_time_grid(const Discretization& d) const {
    int steps = control.steps_per_period;
    if (cfl_factor > 0.0) {
      const double dt_max = cfl_max_dt(d, cfl_factor);
      steps = std::max(steps, static_cast<int>(std::ceil(control.period() / dt_max)));
      steps = ((steps + 3) / 4) * 4;
    }
    return TimeGrid::over_period(control.period(), steps);
  }

  Scenario build_scenario(const Discretization& d) const {
    Scenario s;
    s.omega = control.omega;
    s.drive_amp.assign(d.drive_dofs.size(), {0.0, 0.0});
    const auto& L = d.layout;
    if (drive_profile == "scatterer_uniform") {
      for (auto& a : s.drive_amp) a = drive_amplitude;
    } else if (drive_profile == "traveling_wave") {
      // Trace of E = sin(omega (t - x/c)): amplitude i e^{i omega x / c}.
      for (std::size_t k = 0; k < d.drive_dofs.size(); ++k) {
        const auto& pos = L.e_position[d.drive_dofs[k]];
        const double eps_i = d.ctx.material.eps[d.drive_dofs[k]];
        const double c_loc = 1.0 / std::sqrt(eps_i * d.mu_at_e[d.drive_dofs[k]]);
        const double phi = control.omega * pos[0] / c_loc;
        s.drive_amp[k] = drive_amplitude * std::complex<double>(-std::sin(phi), std::cos(phi));
      }
    } else if (drive_profile == "radiation_sphere") {
      if (grid.system != SystemType::Maxwell3D || obstacle.shape != Obstacle::Shape::Ball)
        throw ConfigError("$.drive.profile", "radiation_sphere requires maxwell_3d with a ball obstacle");
      for (std::size_t k = 0; k < d.drive_dofs.size(); ++k) {
        const std::size_t i = d.drive_dofs[k];
        std::array<double, 3> x = L.e_position[i];
        double r = 0.0;
        for (int a = 0; a < 3; ++a) {
          x[a] -= obstacle.center[a];
          r += x[a] * x[a];
        }
        r = std::sqrt(r);
        if (r < 1e-12) continue;  // degenerate staircase dof at the center
        for (int a = 0; a < 3; ++a) x[a] /= r;  // project onto the unit sphere
        const auto lam = analytic::boundary_lambda_radiation(x, control.omega);
        const int axis = static_cast<int>(L.e_family_of[i]);  // 1-forms: family = axis
        s.drive_amp[k] = drive_amplitude * lam[axis];
      }
    }
    if (source_profile == "e_uniform") {
      s.source_e.assign(L.e_count, {0.0, 0.0});
      for (std::size_t i = 0; i < L.e_count; ++i)
        if (!d.ctx.e_masked[i]) s.source_e[i] = source_amplitude;
    }
    return s;
  }

  /// Uniform refinement: spacing halved, cell counts and steps per period
  /// doubled, so the CFL ratio and the discrete period stay commensurate.
  ScenarioConfig refined(int levels = 1) const {
    ScenarioConfig c = *this;
    for (int l = 0; l < levels; ++l) {
      for (int a = 0; a < grid.dimension; ++a) {
        c.grid.cells[a] *= 2;
        c.grid.spacing[a] *= 0.5;
      }
      c.control.steps_per_period *= 2;
    }
    return c;
  }

 private:
  static const Json& require(const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + "." + key, "missing required section");
    return j.at(key);
  }

  template <typename T>
  static T get(const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + "." + key, "missing required key");
    try {
      return j.at(key).get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(path + "." + key, e.what());
    }
  }

  template <typename T>
  static void read_axis_array(const Json& j, const char* key, std::array<T, 3>& out,
                              int dim, const std::string& path, T fill) {
    const std::string p = path + "." + key;
    if (!j.contains(key)) throw ConfigError(p, "missing required key");
    const Json& a = j.at(key);
    if (!a.is_array() || static_cast<int>(a.size()) != dim)
      throw ConfigError(p, "expected array of length " + std::to_string(dim));
    out.fill(fill);
    for (int i = 0; i < dim; ++i) {
      try {
        out[i] = a[i].get<T>();
      } catch (const Json::exception& e) {
        throw ConfigError(p + "[" + std::to_string(i) + "]", e.what());
      }
    }
  }

  static std::complex<double> read_complex(const Json& j, const char* key,
                                           const std::string& path,
                                           std::complex<double> dflt) {
    if (!j.contains(key)) return dflt;
    const Json& a = j.at(key);
    if (a.is_number()) return {a.get<double>(), 0.0};
    if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number())
      return {a[0].get<double>(), a[1].get<double>()};
    throw ConfigError(path + "." + std::string(key), "expected number or [re, im]");
  }

  template <typename T>
  static Json axis_array(const std::array<T, 3>& a, int dim) {
    Json out = Json::array();
    for (int i = 0; i < dim; ++i) out.push_back(a[i]);
    return out;
  }

  static SystemType parse_system(const std::string& s, const std::string& path) {
    if (s == "acoustic_dirichlet") return SystemType::AcousticDirichlet;
    if (s == "maxwell_2d_te") return SystemType::Maxwell2DTE;
    if (s == "maxwell_3d") return SystemType::Maxwell3D;
    throw ConfigError(path, "unknown system '" + s + "'");
  }

  static FaceCondition parse_face_condition(const std::string& s, const std::string& path) {
    if (s == "dirichlet") return FaceCondition::Dirichlet;
    if (s == "pec") return FaceCondition::Pec;
    if (s == "abc") return FaceCondition::Abc;
    throw ConfigError(path, "unknown boundary condition '" + s + "'");
  }

  static bool region_contains(const MaterialRegion& r, const std::array<double, 3>& x,
                              int dim) {
    for (int a = 0; a < dim; ++a)
      if (x[a] < r.lo[a] - 1e-12 || x[a] > r.hi[a] + 1e-12) return false;
    return true;
  }
};

}  // namespace periwave
