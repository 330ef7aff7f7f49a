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

// Pocket lattice construction and the precomputed one-body field that a
// bead of each family feels at each lattice site.

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pepqubo/chem_model.hpp"
#include "pepqubo/common.hpp"
#include "pepqubo/structure.hpp"

namespace pepqubo {

inline constexpr double kDefaultSpacing = 3.8;
inline constexpr double kDefaultRadius = 7.6;
inline constexpr double kDefaultClashFactor = 0.8;

using GridIndex = std::array<int, 3>;

/// Axis-aligned cubic grid restricted to the pocket.
struct PocketLattice {
  double spacing = kDefaultSpacing;
  Vec3 origin;                       // position of grid index (0,0,0)
  std::vector<GridIndex> grid;       // integer coordinates, sorted
  std::vector<Vec3> points;          // origin + spacing * grid
  std::vector<std::pair<int, int>> bonds; // adjacent pairs (i < j), sorted
  std::array<int, 3> dims{};         // bounding box in grid units
  int s = -1;
  int t = -1;

  int size() const { return static_cast<int>(points.size()); }
  /// Neighbors of point i in ascending order.
  const std::vector<int> &neighbors(int i) const { return neighbors_[static_cast<std::size_t>(i)]; }
  /// Index into `bonds` of the pair {i, j}, or -1 if not adjacent.
  int bond_index(int i, int j) const;
  /// Point at a grid index, or -1.
  int find(const GridIndex &g) const;

  /// Rebuilds neighbor lists and dims from `grid`, `bonds`, `origin`.
  void finalize();

private:
  std::vector<std::vector<int>> neighbors_;
};

struct LatticeOptions {
  double radius = kDefaultRadius;
  double spacing = kDefaultSpacing;
  /// Grid points closer than this to any protein C-alpha are discarded.
  double clash_distance = 0.0;
};

/// clash_factor times the smallest residue diameter.
double clash_distance(const RawTables &raw, double clash_factor = kDefaultClashFactor);

/// Grid anchored at the first seed point. Throws DomainError for radius or
/// spacing <= 0 or no seeds, InputError if no point survives filtering.
PocketLattice build_lattice(const ProteinStructure &protein, const std::vector<Vec3> &seeds,
                            const LatticeOptions &options);

/// Nearest lattice points to a and b (ties: lowest index). If both map to
/// the same point, t falls back to the second-nearest point to b. Throws
/// InputError for lattices with fewer than two points.
std::pair<int, int> choose_endpoints(const PocketLattice &lattice, const Vec3 &a, const Vec3 &b);

/// Per-site, per-family one-body energies and the mean-field offsets.
struct ExternalField {
  int num_points = 0;
  int num_families = 0;
  std::vector<double> energy; // num_points x num_families
  std::vector<double> offset; // E0 per family
  double contacts = 0.0;      // Nc

  double at(int point, int family) const {
    return energy[static_cast<std::size_t>(point * num_families + family)];
  }
  /// E - E0, the coefficient of an occupied site in the design objective.
  double relative(int point, int family) const {
    return at(point, family) - offset[static_cast<std::size_t>(family)];
  }
};

/// E0[k] = Nc * sum_j f_j * epsilon_kj over the model's families.
std::vector<double> mean_field_offset(const InteractionModel &model, double contacts);

/// Throws DomainError for contacts < 0.
ExternalField compute_external_field(const PocketLattice &lattice,
                                     const ProteinStructure &protein,
                                     const InteractionModel &model, double contacts);

/// A placed peptide: bead positions and their labels in the model's
/// alphabet.
struct PlacedPeptide {
  std::vector<Vec3> positions;
  std::vector<int> families;
};

/// Sum over attractive peptide-protein pairs of u(r)/epsilon, each clamped
/// to [0, 1], divided by the peptide length.
double average_partial_contacts(const PlacedPeptide &peptide, const ProteinStructure &protein,
                                const InteractionModel &model);

struct ContactEstimate {
  double contacts = 0.0;
  std::vector<double> trace; // Nc used by each design run, then the final value
  int iterations = 0;
};

class ContactConvergenceError : public std::runtime_error {
public:
  ContactConvergenceError(const std::string &what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double> &trace() const { return trace_; }

private:
  std::vector<double> trace_;
};

/// Self-consistent contact number: design with Nc (starting at 0), measure
/// the contacts of the result, repeat until the relative change is at most
/// `tolerance`. Throws DomainError for tolerance outside (0,1) and
/// ContactConvergenceError after `max_iterations` designs.
ContactEstimate estimate_contacts(const std::function<PlacedPeptide(double)> &design,
                                  const ProteinStructure &protein,
                                  const InteractionModel &model, double tolerance = 0.10,
                                  int max_iterations = 10);

} // namespace pepqubo
