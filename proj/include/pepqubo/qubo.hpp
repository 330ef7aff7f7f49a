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

// Binary encodings of the design problem.
//
// Stage 1 jointly places and labels a chain on the pocket lattice. Each
// lattice point i carries D site bits q_i^k, each adjacent pair {i,j} a bond
// bit q_ij, and each (bond, family) pair an ancilla a_ij^k = q_i^k q_ij
// attached to the lower-index endpoint i. The objective is
//
//   H = H_ext + H_int + H_anc + H_occ + H_path + H_length
//
// with
//   H_ext    = sum_i sum_k (E_i^k - E0^k) q_i^k
//   H_int    = sum_{i<j, r_ij <= cutoff} sum_kl u_kl(r_ij) (q_i^k - a_ij^k) q_j^l
//   H_anc    = A sum_{ij} sum_k (3a + q_i^k q_ij - 2 q_i^k a - 2 q_ij a)
//   H_occ    = A sum_i sum_{k != l} q_i^k q_i^l
//   H_path   = A (h_s + h_t + sum_{r != s,t} (2 sum_k q_r^k - sum_j q_rj)^2)
//   h_e      = +/-(1 - sum_k q_e^k)^2 + (sum_k q_e^k - sum_j q_ej)^2
//   H_length = w (L0 - sum_ij q_ij)^2
//
// Stage 2 freezes the chain geometry and optimizes one of the full-alphabet
// residues per position.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pepqubo/chem_model.hpp"
#include "pepqubo/common.hpp"
#include "pepqubo/pocket.hpp"

namespace pepqubo {

enum class VarKind { Site, Bond, Ancilla, Position };

/// Semantics of one binary variable.
///   Site:     point = a, family
///   Bond:     points a < b
///   Ancilla:  canonical endpoint a, other endpoint b, family
///   Position: chain position a, residue/family
struct VariableLabel {
  VarKind kind = VarKind::Site;
  int a = 0;
  int b = -1;
  int family = -1;

  bool operator==(const VariableLabel &) const = default;
};

std::string to_string(VarKind kind);
VarKind var_kind_from_string(const std::string &name);

class VariableRegistry {
public:
  VariableRegistry() = default;

  /// Sites (point-major), then bonds in lattice order, then ancillas
  /// (bond-major).
  static VariableRegistry stage1(const PocketLattice &lattice, int num_families);
  /// Position-major (position, residue) pairs.
  static VariableRegistry stage2(int positions, int alphabet);
  /// Arbitrary labels, e.g. read back from an interchange file.
  static VariableRegistry from_labels(std::vector<VariableLabel> labels);

  int total() const { return static_cast<int>(labels_.size()); }
  const std::vector<VariableLabel> &labels() const { return labels_; }
  int num_points() const { return num_points_; }
  int num_families() const { return num_families_; }
  int num_bonds() const { return num_bonds_; }
  int num_positions() const { return num_positions_; }

  int site(int point, int family) const { return point * num_families_ + family; }
  int bond(int bond_index) const { return num_points_ * num_families_ + bond_index; }
  int ancilla(int bond_index, int family) const {
    return num_points_ * num_families_ + num_bonds_ + bond_index * num_families_ + family;
  }
  int position(int pos, int family) const { return pos * num_families_ + family; }

  bool operator==(const VariableRegistry &) const = default;

private:
  std::vector<VariableLabel> labels_;
  int num_points_ = 0;
  int num_families_ = 0;
  int num_bonds_ = 0;
  int num_positions_ = 0;
};

struct ProblemMeta {
  std::string stage; // "stage1", "stage2" or empty
  double A = 0.0;
  double w = 0.0;
  int L0 = 0;
  double p = 0.0;
  int D = 0;
  std::array<int, 3> dims{};
  int s = -1;
  int t = -1;
  bool literal_endpoint_signs = false;

  bool operator==(const ProblemMeta &) const = default;
};

using PairKey = std::pair<int, int>;

class QuboProblem {
public:
  QuboProblem() = default;
  explicit QuboProblem(VariableRegistry registry);

  int num_vars() const { return registry_.total(); }
  const VariableRegistry &registry() const { return registry_; }

  const std::vector<double> &linear() const { return linear_; }
  const std::map<PairKey, double> &quadratic() const { return quadratic_; }
  double offset() const { return offset_; }

  /// c * x_i
  void add_linear(int i, double c);
  /// c * x_i * x_j; i == j folds into the linear term.
  void add_quadratic(int i, int j, double c);
  void add_offset(double c) { offset_ += c; }
  /// coef * (constant + sum_v weight_v x_v)^2, expanded with x^2 = x.
  void add_squared(double coef, double constant, const std::vector<std::pair<int, double>> &terms);

  double energy(const Bits &bits) const;

  ProblemMeta meta;

  bool operator==(const QuboProblem &) const = default;

private:
  VariableRegistry registry_;
  std::vector<double> linear_;
  std::map<PairKey, double> quadratic_;
  double offset_ = 0.0;
};

/// Energy over spins s in {-1,+1}: sum h s + sum J s s + offset.
struct IsingProblem {
  VariableRegistry registry;
  std::vector<double> h;
  std::map<PairKey, double> J;
  double offset = 0.0;
  ProblemMeta meta;

  int num_vars() const { return registry.total(); }
  double energy(const std::vector<int> &spins) const;

  bool operator==(const IsingProblem &) const = default;
};

/// Exact substitution x = (s + 1) / 2.
IsingProblem to_ising(const QuboProblem &q);

struct Stage1Params {
  int L0 = 10;
  double p = 0.0;
  std::optional<double> A;
  std::optional<double> w;
  bool literal_endpoint_signs = false;
};

/// Largest |coefficient| among the soft (physical) stage-1 terms.
double max_physical_coefficient(const PocketLattice &lattice, const ExternalField &field,
                                const InteractionModel &model);

/// 10 * max_physical * L0 (a scale of 1 is used when all physical terms vanish).
double default_penalty(double max_physical, int L0);

/// w = A for p == 0; w = A / (L0^2 p^2) otherwise.
double default_length_weight(double A, int L0, double p);

/// Throws InputError for an empty lattice, unset or identical endpoints, a
/// field that does not match the lattice or model, A <= 0 or L0 < 1.
QuboProblem build_stage1_qubo(const PocketLattice &lattice, const ExternalField &field,
                              const InteractionModel &model, const Stage1Params &params);

/// Validates that `path` is a self-avoiding chain of adjacent lattice points.
void validate_path(const PocketLattice &lattice, const std::vector<int> &path);

/// Sequence-only problem on a frozen chain. Pairs of consecutive positions
/// do not interact. Each position carries A (1 - sum_k q_n^k)^2.
QuboProblem build_stage2_qubo(const PocketLattice &lattice, const std::vector<int> &path,
                              const ExternalField &field, const InteractionModel &model,
                              std::optional<double> A = std::nullopt);

struct ResourceCount {
  long long bonds = 0;
  long long annealer = 0; // bonds (D + 1) + D * points
  long long gate = 0;     // bonds + ceil(log2(D + 1)) * points
};

/// Closed form for a full Lx x Ly x Lz box. Throws DomainError for
/// non-positive dims or D.
ResourceCount count_variables(const std::array<int, 3> &dims, int D);

/// Same counts from an arbitrary (possibly pruned) lattice.
ResourceCount count_variables(const PocketLattice &lattice, int D);

} // namespace pepqubo
