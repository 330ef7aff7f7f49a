// Copyright 2026 The pepqubo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Fixtures and independent reference evaluations shared by the tests. The
// oracles below work from variable semantics and geometry only; they do not
// call the QUBO builders.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "pepqubo/chem_model.hpp"
#include "pepqubo/pocket.hpp"
#include "pepqubo/qubo.hpp"

namespace testing {

using namespace pepqubo;

inline std::filesystem::path fixture(const std::string &name) {
  return std::filesystem::path(PEPQUBO_FIXTURE_DIR) / name;
}

inline const RawTables &tables() {
  static const RawTables raw = load_raw_tables(default_data_dir());
  return raw;
}

/// Full Lx x Ly x Lz box with s = first and t = last point.
inline PocketLattice box_lattice(int lx, int ly, int lz, double spacing = kDefaultSpacing,
                                 Vec3 origin = {0, 0, 0}) {
  PocketLattice l;
  l.spacing = spacing;
  l.origin = origin;
  for (int x = 0; x < lx; ++x)
    for (int y = 0; y < ly; ++y)
      for (int z = 0; z < lz; ++z) {
        l.grid.push_back({x, y, z});
        l.points.push_back(origin + Vec3{x * spacing, y * spacing, z * spacing});
      }
  for (int i = 0; i < static_cast<int>(l.grid.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(l.grid.size()); ++j) {
      const auto &a = l.grid[static_cast<std::size_t>(i)];
      const auto &b = l.grid[static_cast<std::size_t>(j)];
      int d = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
      if (d == 1)
        l.bonds.emplace_back(i, j);
    }
  l.finalize();
  l.s = 0;
  l.t = static_cast<int>(l.points.size()) - 1;
  return l;
}

/// A few residues in a layer above the z=0 plane of `center`, close
/// enough for a non-zero field but outside the repulsive core.
inline ProteinStructure nearby_protein(const Vec3 &center) {
  ProteinStructure p;
  const char *codes = "LKDFW";
  const Vec3 offsets[] = {{0, 0, 6.5}, {3, 0, 7}, {-3, 1, 7.5}, {0, 3, 7}, {1, -3, 6.8}};
  for (int i = 0; i < 5; ++i) {
    Residue r;
    r.type = AminoAcid::from_code(codes[i]);
    r.ca = center + offsets[i];
    r.chain = 'A';
    r.number = i + 1;
    p.residues.push_back(r);
  }
  return p;
}

inline InteractionModel model_with(int D) {
  return reduce_model(tables(), cluster_alphabet(tables(), D));
}

struct Stage1Instance {
  PocketLattice lattice;
  InteractionModel model;
  ExternalField field;
  QuboProblem problem;
};

/// Box lattice with a small protein next to it; s and t are the first and
/// last point.
inline Stage1Instance stage1_instance(int lx, int ly, int lz, int D, Stage1Params params = {},
                                      double contacts = 1.0) {
  Stage1Instance in;
  in.lattice = box_lattice(lx, ly, lz);
  in.model = model_with(D);
  Vec3 center = in.lattice.points.back() * 0.5;
  in.field = compute_external_field(in.lattice, nearby_protein(center), in.model, contacts);
  in.problem = build_stage1_qubo(in.lattice, in.field, in.model, params);
  return in;
}

/// Stage-1 objective computed term by term from what each bit means.
struct TermEnergies {
  double ext = 0, inter = 0, anc = 0, occ = 0, path = 0, length = 0;
  double total() const { return ext + inter + anc + occ + path + length; }
};

inline TermEnergies stage1_terms(const Bits &x, const VariableRegistry &reg,
                                 const PocketLattice &lat, const ExternalField &field,
                                 const InteractionModel &model, const ProblemMeta &meta) {
  const int n = lat.size();
  const int D = model.num_families;
  std::vector<std::vector<int>> site(static_cast<std::size_t>(n), std::vector<int>(D, 0));
  std::map<std::pair<int, int>, int> bond;
  std::map<std::tuple<int, int, int>, int> anc;
  for (int v = 0; v < reg.total(); ++v) {
    const auto &l = reg.labels()[static_cast<std::size_t>(v)];
    int bit = x[static_cast<std::size_t>(v)];
    if (l.kind == VarKind::Site)
      site[static_cast<std::size_t>(l.a)][static_cast<std::size_t>(l.family)] = bit;
    else if (l.kind == VarKind::Bond)
      bond[{l.a, l.b}] = bit;
    else if (l.kind == VarKind::Ancilla)
      anc[{l.a, l.b, l.family}] = bit;
  }
  auto bond_at = [&](int i, int j) {
    auto it = bond.find({std::min(i, j), std::max(i, j)});
    return it == bond.end() ? -1 : it->second;
  };
  const double A = meta.A;
  TermEnergies e;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < D; ++k)
      if (site[i][k])
        e.ext += field.at(i, k) - field.offset[static_cast<std::size_t>(k)];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double r = distance(lat.points[static_cast<std::size_t>(i)],
                          lat.points[static_cast<std::size_t>(j)]);
      if (r > model.cutoff)
        continue;
      bool bonded = bond_at(i, j) >= 0;
      for (int k = 0; k < D; ++k)
        for (int l = 0; l < D; ++l) {
          double u = lj_potential(model.epsilon(k, l), model.sigma_pair(k, l), r, model.cutoff);
          int left = site[i][k] - (bonded ? anc.at({i, j, k}) : 0);
          e.inter += u * left * site[j][l];
        }
    }
  for (const auto &[key, a] : anc) {
    auto [i, j, k] = key;
    int xi = site[i][k];
    int y = bond_at(i, j);
    e.anc += A * (3 * a + xi * y - 2 * xi * a - 2 * y * a);
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < D; ++k)
      for (int l = 0; l < D; ++l)
        if (k != l)
          e.occ += A * site[i][k] * site[i][l];
  const double sign = meta.literal_endpoint_signs ? -1.0 : 1.0;
  for (int r = 0; r < n; ++r) {
    int occ = 0, deg = 0;
    for (int k = 0; k < D; ++k)
      occ += site[r][k];
    for (int j : lat.neighbors(r))
      deg += bond_at(r, j);
    if (r == meta.s || r == meta.t)
      e.path += A * (sign * (1 - occ) * (1 - occ) + (occ - deg) * (occ - deg));
    else
      e.path += A * (2 * occ - deg) * (2 * occ - deg);
  }
  int total_bonds = 0;
  for (const auto &[key, b] : bond)
    total_bonds += b;
  e.length = meta.w * (meta.L0 - total_bonds) * (meta.L0 - total_bonds);
  return e;
}

/// Area under the precision-recall step curve, recomputed for every prefix
/// from scratch.
inline double brute_force_auc(const std::vector<bool> &labels) {
  int positives = 0;
  for (bool b : labels)
    positives += b;
  if (positives == 0)
    return 0.0;
  double auc = 0.0;
  for (std::size_t k = 1; k <= labels.size(); ++k) {
    int tp = 0, tp_prev = 0;
    for (std::size_t i = 0; i < k; ++i)
      tp += labels[i];
    for (std::size_t i = 0; i + 1 < k; ++i)
      tp_prev += labels[i];
    double precision = static_cast<double>(tp) / static_cast<double>(k);
    double dr = static_cast<double>(tp - tp_prev) / positives;
    auc += dr * precision;
  }
  return auc;
}

inline Bits bits_of(std::uint64_t mask, int n) {
  Bits b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    b[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
  return b;
}

} // namespace testing
