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

#include "pepqubo/pocket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace pepqubo {

int PocketLattice::bond_index(int i, int j) const {
  if (i > j)
    std::swap(i, j);
  auto it = std::lower_bound(bonds.begin(), bonds.end(), std::make_pair(i, j));
  if (it == bonds.end() || *it != std::make_pair(i, j))
    return -1;
  return static_cast<int>(it - bonds.begin());
}

int PocketLattice::find(const GridIndex &g) const {
  auto it = std::lower_bound(grid.begin(), grid.end(), g);
  if (it == grid.end() || *it != g)
    return -1;
  return static_cast<int>(it - grid.begin());
}

void PocketLattice::finalize() {
  neighbors_.assign(points.size(), {});
  for (auto [i, j] : bonds) {
    neighbors_[static_cast<std::size_t>(i)].push_back(j);
    neighbors_[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto &n : neighbors_)
    std::sort(n.begin(), n.end());
  dims = {0, 0, 0};
  if (grid.empty())
    return;
  for (int axis = 0; axis < 3; ++axis) {
    auto [lo, hi] = std::minmax_element(grid.begin(), grid.end(), [axis](const auto &a, const auto &b) {
      return a[static_cast<std::size_t>(axis)] < b[static_cast<std::size_t>(axis)];
    });
    dims[static_cast<std::size_t>(axis)] =
        (*hi)[static_cast<std::size_t>(axis)] - (*lo)[static_cast<std::size_t>(axis)] + 1;
  }
}

double clash_distance(const RawTables &raw, double clash_factor) {
  return clash_factor * *std::min_element(raw.sigma.begin(), raw.sigma.end());
}

PocketLattice build_lattice(const ProteinStructure &protein, const std::vector<Vec3> &seeds,
                            const LatticeOptions &options) {
  if (seeds.empty())
    throw DomainError("at least one seed point is required");
  if (!(options.radius > 0.0) || !(options.spacing > 0.0))
    throw DomainError("radius and spacing must be positive");

  PocketLattice lattice;
  lattice.spacing = options.spacing;
  lattice.origin = seeds.front();

  GridIndex lo{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
               std::numeric_limits<int>::max()};
  GridIndex hi{std::numeric_limits<int>::min(), std::numeric_limits<int>::min(),
               std::numeric_limits<int>::min()};
  for (const auto &seed : seeds) {
    Vec3 rel = seed - lattice.origin;
    const double c[3] = {rel.x, rel.y, rel.z};
    for (std::size_t a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], static_cast<int>(std::floor((c[a] - options.radius) / options.spacing)));
      hi[a] = std::max(hi[a], static_cast<int>(std::ceil((c[a] + options.radius) / options.spacing)));
    }
  }

  const double tol = 1e-9;
  for (int x = lo[0]; x <= hi[0]; ++x)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int z = lo[2]; z <= hi[2]; ++z) {
        Vec3 p = lattice.origin + Vec3{double(x), double(y), double(z)} * options.spacing;
        bool near = std::any_of(seeds.begin(), seeds.end(), [&](const Vec3 &s) {
          return distance(p, s) <= options.radius + tol;
        });
        if (!near)
          continue;
        bool clash = std::any_of(protein.residues.begin(), protein.residues.end(),
                                 [&](const Residue &r) { return distance(p, r.ca) < options.clash_distance; });
        if (clash)
          continue;
        lattice.grid.push_back({x, y, z});
        lattice.points.push_back(p);
      }
  if (lattice.points.empty())
    throw InputError("empty lattice: no grid point survives the radius and clash filters");

  // Lexicographic enumeration: +x, +y, +z neighbors always have larger indices.
  for (int i = 0; i < lattice.size(); ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      GridIndex g = lattice.grid[static_cast<std::size_t>(i)];
      ++g[a];
      if (int j = lattice.find(g); j >= 0)
        lattice.bonds.emplace_back(i, j);
    }
  }
  std::sort(lattice.bonds.begin(), lattice.bonds.end());
  lattice.finalize();
  return lattice;
}

std::pair<int, int> choose_endpoints(const PocketLattice &lattice, const Vec3 &a, const Vec3 &b) {
  if (lattice.size() < 2)
    throw InputError("endpoints need a lattice with at least two points");
  constexpr double tie = 1e-9;
  auto nearest = [&](const Vec3 &q, int exclude) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < lattice.size(); ++i) {
      if (i == exclude)
        continue;
      double d = distance(q, lattice.points[static_cast<std::size_t>(i)]);
      if (d < best_d - tie) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  int s = nearest(a, -1);
  int t = nearest(b, -1);
  if (t == s)
    t = nearest(b, s);
  return {s, t};
}

std::vector<double> mean_field_offset(const InteractionModel &model, double contacts) {
  const auto d = static_cast<std::size_t>(model.num_families);
  std::vector<double> offset(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double avg = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      avg += model.family_frequency[j] * model.epsilon(k, j);
    offset[k] = contacts * avg;
  }
  return offset;
}

ExternalField compute_external_field(const PocketLattice &lattice,
                                     const ProteinStructure &protein,
                                     const InteractionModel &model, double contacts) {
  if (!(contacts >= 0.0))
    throw DomainError("contact number must be non-negative");
  ExternalField field;
  field.num_points = lattice.size();
  field.num_families = model.num_families;
  field.contacts = contacts;
  field.energy.assign(static_cast<std::size_t>(field.num_points * field.num_families), 0.0);
  for (int i = 0; i < field.num_points; ++i) {
    const Vec3 &p = lattice.points[static_cast<std::size_t>(i)];
    for (const auto &res : protein.residues) {
      double r = distance(p, res.ca);
      if (r > model.cutoff)
        continue;
      int fam = model.family_of(res.type);
      for (int k = 0; k < field.num_families; ++k)
        field.energy[static_cast<std::size_t>(i * field.num_families + k)] +=
            model.lj_energy(k, fam, r);
    }
  }
  field.offset = mean_field_offset(model, contacts);
  return field;
}

double average_partial_contacts(const PlacedPeptide &peptide, const ProteinStructure &protein,
                                const InteractionModel &model) {
  if (peptide.positions.size() != peptide.families.size())
    throw InputError("peptide positions and labels differ in length");
  if (peptide.positions.empty())
    return 0.0;
  double sum = 0.0;
  for (std::size_t n = 0; n < peptide.positions.size(); ++n) {
    int k = peptide.families[n];
    for (const auto &res : protein.residues) {
      int l = model.family_of(res.type);
      double eps = model.epsilon(static_cast<std::size_t>(k), static_cast<std::size_t>(l));
      if (!(eps < 0.0))
        continue;
      double u = model.lj_energy(k, l, distance(peptide.positions[n], res.ca));
      sum += std::clamp(u / eps, 0.0, 1.0);
    }
  }
  return sum / static_cast<double>(peptide.positions.size());
}

ContactEstimate estimate_contacts(const std::function<PlacedPeptide(double)> &design,
                                  const ProteinStructure &protein,
                                  const InteractionModel &model, double tolerance,
                                  int max_iterations) {
  if (!(tolerance > 0.0 && tolerance < 1.0))
    throw DomainError("tolerance must lie in (0, 1)");
  ContactEstimate est;
  double current = 0.0;
  est.trace.push_back(current);
  for (int it = 1; it <= max_iterations; ++it) {
    double measured = average_partial_contacts(design(current), protein, model);
    est.trace.push_back(measured);
    est.iterations = it;
    double scale = std::max(std::abs(current), std::abs(measured));
    double change = scale > 0.0 ? std::abs(measured - current) / scale : 0.0;
    if (change <= tolerance) {
      est.contacts = measured;
      return est;
    }
    current = measured;
  }
  throw ContactConvergenceError("contact number did not converge after " +
                                    std::to_string(max_iterations) + " designs",
                                est.trace);
}

} // namespace pepqubo
