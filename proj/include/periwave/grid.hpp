// SPDX-License-Identifier: Apache-2.0
//
// Staggered orthogonal grids and degree-of-freedom layouts for first-order
// wave systems. The E component is stored as a q-form (q = 0 for acoustics,
// q = 1 for Maxwell), the H component as a (q+1)-form; each form family is
// staggered along its member axes, which reproduces the classical Yee layout
// for Maxwell and the node/edge layout for acoustics.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace periwave {

enum class SystemType { AcousticDirichlet, Maxwell2DTE, Maxwell3D };

enum class FaceTag { Scatterer, Artificial };

/// Exterior box faces, indexed as 2*axis + (0 = low side, 1 = high side).
enum class Face : int { XLo = 0, XHi, YLo, YHi, ZLo, ZHi };

inline int face_axis(Face f) { return static_cast<int>(f) / 2; }
inline bool face_high(Face f) { return static_cast<int>(f) % 2 != 0; }

inline const char* to_string(SystemType s) {
  switch (s) {
    case SystemType::AcousticDirichlet: return "acoustic_dirichlet";
    case SystemType::Maxwell2DTE: return "maxwell_2d_te";
    case SystemType::Maxwell3D: return "maxwell_3d";
  }
  return "?";
}

struct GridSpec {
  int dimension = 1;
  SystemType system = SystemType::AcousticDirichlet;
  std::array<int, 3> cells{2, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<FaceTag, 6> boundary_tags{FaceTag::Artificial, FaceTag::Artificial,
                                       FaceTag::Artificial, FaceTag::Artificial,
                                       FaceTag::Artificial, FaceTag::Artificial};

  /// Form degree of the E component.
  int q() const { return system == SystemType::AcousticDirichlet ? 0 : 1; }

  int face_count() const { return 2 * dimension; }

  double extent(int axis) const { return cells[axis] * spacing[axis]; }

  void validate() const {
    if (dimension < 1 || dimension > 3)
      throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
    if (system == SystemType::Maxwell2DTE && dimension != 2)
      throw std::invalid_argument("grid: maxwell_2d_te requires dimension 2");
    if (system == SystemType::Maxwell3D && dimension != 3)
      throw std::invalid_argument("grid: maxwell_3d requires dimension 3");
    for (int a = 0; a < dimension; ++a) {
      if (cells[a] < 2)
        throw std::invalid_argument("grid: need at least 2 cells per axis");
      if (!(spacing[a] > 0.0))
        throw std::invalid_argument("grid: spacing must be positive");
    }
  }
};

/// One family of form degrees of freedom (e.g. the x-edge E components).
/// A family is staggered (shifted by half a spacing) along every axis in
/// `axes_mask` and node-aligned along the others.
struct FormFamily {
  unsigned axes_mask = 0;       // bit a set: staggered along axis a
  std::array<int, 3> size{1, 1, 1};
  std::size_t offset = 0;       // start index within the component array

  std::size_t count() const {
    return static_cast<std::size_t>(size[0]) * size[1] * size[2];
  }
  bool staggered(int axis) const { return (axes_mask >> axis) & 1u; }
};

/// Degree-of-freedom layout: families, per-dof positions and geometric
/// measures (the diagonal Hodge weights before material scaling).
class DofLayout {
 public:
  GridSpec grid;
  std::vector<FormFamily> e_families;
  std::vector<FormFamily> h_families;
  std::size_t e_count = 0;
  std::size_t h_count = 0;
  std::vector<double> e_measure, h_measure;
  std::vector<std::array<double, 3>> e_position, h_position;
  std::vector<std::uint16_t> e_family_of, h_family_of;

  static DofLayout build(const GridSpec& spec) {
    spec.validate();
    DofLayout L;
    L.grid = spec;
    switch (spec.system) {
      case SystemType::AcousticDirichlet:
        L.e_families.push_back(make_family(spec, 0u));
        for (int a = 0; a < spec.dimension; ++a)
          L.h_families.push_back(make_family(spec, 1u << a));
        break;
      case SystemType::Maxwell2DTE:
        L.e_families.push_back(make_family(spec, 1u << 0));
        L.e_families.push_back(make_family(spec, 1u << 1));
        L.h_families.push_back(make_family(spec, 3u));
        break;
      case SystemType::Maxwell3D:
        for (int a = 0; a < 3; ++a)
          L.e_families.push_back(make_family(spec, 1u << a));
        // H on faces, ordered by normal axis: x-face spans {y,z}, ...
        L.h_families.push_back(make_family(spec, 6u));
        L.h_families.push_back(make_family(spec, 5u));
        L.h_families.push_back(make_family(spec, 3u));
        break;
    }
    L.finalize();
    return L;
  }

  /// Linear dof index within a family from per-axis indices.
  static std::size_t linear(const FormFamily& f, int i, int j, int k) {
    return (static_cast<std::size_t>(i) * f.size[1] + j) * f.size[2] + k;
  }

  bool e_on_face(std::size_t dof, Face face) const {
    return on_face(e_families[e_family_of[dof]], e_position[dof], face);
  }
  bool h_on_face(std::size_t dof, Face face) const {
    return on_face(h_families[h_family_of[dof]], h_position[dof], face);
  }

 private:
  static FormFamily make_family(const GridSpec& spec, unsigned mask) {
    FormFamily f;
    f.axes_mask = mask;
    for (int a = 0; a < 3; ++a) {
      if (a >= spec.dimension)
        f.size[a] = 1;
      else
        f.size[a] = f.staggered(a) ? spec.cells[a] : spec.cells[a] + 1;
    }
    return f;
  }

  bool on_face(const FormFamily& fam, const std::array<double, 3>& pos,
               Face face) const {
    const int a = face_axis(face);
    if (a >= grid.dimension || fam.staggered(a)) return false;
    const double target =
        grid.origin[a] + (face_high(face) ? grid.extent(a) : 0.0);
    return std::abs(pos[a] - target) < 0.5 * grid.spacing[a];
  }

  void finalize() {
    fill(e_families, e_count, e_measure, e_position, e_family_of);
    fill(h_families, h_count, h_measure, h_position, h_family_of);
  }

  void fill(std::vector<FormFamily>& fams, std::size_t& total,
            std::vector<double>& measure,
            std::vector<std::array<double, 3>>& position,
            std::vector<std::uint16_t>& family_of) {
    total = 0;
    for (auto& f : fams) {
      f.offset = total;
      total += f.count();
    }
    measure.resize(total);
    position.resize(total);
    family_of.resize(total);
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
      const FormFamily& f = fams[fi];
      std::size_t idx = f.offset;
      for (int i = 0; i < f.size[0]; ++i)
        for (int j = 0; j < f.size[1]; ++j)
          for (int k = 0; k < f.size[2]; ++k, ++idx) {
            const std::array<int, 3> ijk{i, j, k};
            double m = 1.0;
            std::array<double, 3> pos{0.0, 0.0, 0.0};
            for (int a = 0; a < grid.dimension; ++a) {
              const double h = grid.spacing[a];
              if (f.staggered(a)) {
                m *= h;
                pos[a] = grid.origin[a] + (ijk[a] + 0.5) * h;
              } else {
                const bool bnd = ijk[a] == 0 || ijk[a] == grid.cells[a];
                m *= bnd ? 0.5 * h : h;
                pos[a] = grid.origin[a] + ijk[a] * h;
              }
            }
            measure[idx] = m;
            position[idx] = pos;
            family_of[idx] = static_cast<std::uint16_t>(fi);
          }
    }
  }
};

}  // namespace periwave
