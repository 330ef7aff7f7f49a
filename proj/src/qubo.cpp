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

#include "pepqubo/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pepqubo {

std::string to_string(VarKind kind) {
  switch (kind) {
  case VarKind::Site:
    return "site";
  case VarKind::Bond:
    return "bond";
  case VarKind::Ancilla:
    return "ancilla";
  case VarKind::Position:
    return "position";
  }
  return "site";
}

VarKind var_kind_from_string(const std::string &name) {
  if (name == "site")
    return VarKind::Site;
  if (name == "bond")
    return VarKind::Bond;
  if (name == "ancilla")
    return VarKind::Ancilla;
  if (name == "position")
    return VarKind::Position;
  throw InputError("unknown variable kind '" + name + "'");
}

VariableRegistry VariableRegistry::stage1(const PocketLattice &lattice, int num_families) {
  if (num_families < 1)
    throw DomainError("alphabet size must be positive");
  VariableRegistry reg;
  reg.num_points_ = lattice.size();
  reg.num_families_ = num_families;
  reg.num_bonds_ = static_cast<int>(lattice.bonds.size());
  for (int i = 0; i < reg.num_points_; ++i)
    for (int k = 0; k < num_families; ++k)
      reg.labels_.push_back({VarKind::Site, i, -1, k});
  for (auto [i, j] : lattice.bonds)
    reg.labels_.push_back({VarKind::Bond, i, j, -1});
  for (auto [i, j] : lattice.bonds)
    for (int k = 0; k < num_families; ++k)
      reg.labels_.push_back({VarKind::Ancilla, i, j, k});
  return reg;
}

VariableRegistry VariableRegistry::stage2(int positions, int alphabet) {
  if (positions < 1 || alphabet < 1)
    throw DomainError("stage-2 registry needs positions and an alphabet");
  VariableRegistry reg;
  reg.num_positions_ = positions;
  reg.num_families_ = alphabet;
  for (int n = 0; n < positions; ++n)
    for (int k = 0; k < alphabet; ++k)
      reg.labels_.push_back({VarKind::Position, n, -1, k});
  return reg;
}

VariableRegistry VariableRegistry::from_labels(std::vector<VariableLabel> labels) {
  VariableRegistry reg;
  std::set<int> points;
  int max_family = -1;
  for (const auto &l : labels) {
    max_family = std::max(max_family, l.family);
    switch (l.kind) {
    case VarKind::Site:
      points.insert(l.a);
      break;
    case VarKind::Bond:
      ++reg.num_bonds_;
      break;
    case VarKind::Position:
      reg.num_positions_ = std::max(reg.num_positions_, l.a + 1);
      break;
    case VarKind::Ancilla:
      break;
    }
  }
  reg.num_points_ = static_cast<int>(points.size());
  reg.num_families_ = max_family + 1;
  reg.labels_ = std::move(labels);
  return reg;
}

QuboProblem::QuboProblem(VariableRegistry registry)
    : registry_(std::move(registry)),
      linear_(static_cast<std::size_t>(registry_.total()), 0.0) {}

void QuboProblem::add_linear(int i, double c) {
  if (i < 0 || i >= num_vars())
    throw DomainError("variable index out of range");
  linear_[static_cast<std::size_t>(i)] += c;
}

void QuboProblem::add_quadratic(int i, int j, double c) {
  if (i == j) {
    add_linear(i, c);
    return;
  }
  if (i < 0 || j < 0 || i >= num_vars() || j >= num_vars())
    throw DomainError("variable index out of range");
  if (i > j)
    std::swap(i, j);
  quadratic_[{i, j}] += c;
}

void QuboProblem::add_squared(double coef, double constant,
                              const std::vector<std::pair<int, double>> &terms) {
  std::map<int, double> merged;
  for (auto [v, w] : terms)
    merged[v] += w;
  std::vector<std::pair<int, double>> t(merged.begin(), merged.end());
  add_offset(coef * constant * constant);
  for (std::size_t a = 0; a < t.size(); ++a) {
    add_linear(t[a].first, coef * (2.0 * constant * t[a].second + t[a].second * t[a].second));
    for (std::size_t b = a + 1; b < t.size(); ++b)
      add_quadratic(t[a].first, t[b].first, coef * 2.0 * t[a].second * t[b].second);
  }
}

double QuboProblem::energy(const Bits &bits) const {
  if (static_cast<int>(bits.size()) != num_vars())
    throw DomainError("assignment length does not match the problem");
  double e = offset_;
  for (std::size_t i = 0; i < linear_.size(); ++i)
    if (bits[i])
      e += linear_[i];
  for (const auto &[key, c] : quadratic_)
    if (bits[static_cast<std::size_t>(key.first)] && bits[static_cast<std::size_t>(key.second)])
      e += c;
  return e;
}

double IsingProblem::energy(const std::vector<int> &spins) const {
  if (static_cast<int>(spins.size()) != num_vars())
    throw DomainError("spin vector length does not match the problem");
  double e = offset;
  for (std::size_t i = 0; i < h.size(); ++i)
    e += h[i] * spins[i];
  for (const auto &[key, c] : J)
    e += c * spins[static_cast<std::size_t>(key.first)] * spins[static_cast<std::size_t>(key.second)];
  return e;
}

IsingProblem to_ising(const QuboProblem &q) {
  IsingProblem out;
  out.registry = q.registry();
  out.meta = q.meta;
  out.h.assign(q.linear().size(), 0.0);
  out.offset = q.offset();
  for (std::size_t i = 0; i < q.linear().size(); ++i) {
    out.h[i] += q.linear()[i] / 2.0;
    out.offset += q.linear()[i] / 2.0;
  }
  for (const auto &[key, c] : q.quadratic()) {
    out.J[key] += c / 4.0;
    out.h[static_cast<std::size_t>(key.first)] += c / 4.0;
    out.h[static_cast<std::size_t>(key.second)] += c / 4.0;
    out.offset += c / 4.0;
  }
  return out;
}

namespace {

struct PairInteraction {
  int i;
  int j;
  double r;
};

// Unordered point pairs within the model cutoff.
std::vector<PairInteraction> pairs_within_cutoff(const std::vector<Vec3> &points, double cutoff) {
  std::vector<PairInteraction> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double r = distance(points[i], points[j]);
      if (r <= cutoff)
        out.push_back({static_cast<int>(i), static_cast<int>(j), r});
    }
  return out;
}

void check_field(const PocketLattice &lattice, const ExternalField &field,
                 const InteractionModel &model) {
  if (field.num_points != lattice.size() || field.num_families != model.num_families)
    throw InputError("external field does not match the lattice and model");
}

} // namespace

double max_physical_coefficient(const PocketLattice &lattice, const ExternalField &field,
                                const InteractionModel &model) {
  check_field(lattice, field, model);
  double m = 0.0;
  for (int i = 0; i < lattice.size(); ++i)
    for (int k = 0; k < model.num_families; ++k)
      m = std::max(m, std::abs(field.relative(i, k)));
  for (const auto &pr : pairs_within_cutoff(lattice.points, model.cutoff))
    for (int k = 0; k < model.num_families; ++k)
      for (int l = 0; l < model.num_families; ++l)
        m = std::max(m, std::abs(model.lj_energy(k, l, pr.r)));
  return m;
}

double default_penalty(double max_physical, int L0) {
  double scale = max_physical > 0.0 ? max_physical : 1.0;
  return 10.0 * scale * std::max(1, L0);
}

double default_length_weight(double A, int L0, double p) {
  if (p > 0.0)
    return A / (static_cast<double>(L0) * L0 * p * p);
  return A;
}

QuboProblem build_stage1_qubo(const PocketLattice &lattice, const ExternalField &field,
                              const InteractionModel &model, const Stage1Params &params) {
  if (lattice.size() == 0)
    throw InputError("empty lattice");
  if (lattice.s < 0 || lattice.t < 0 || lattice.s >= lattice.size() || lattice.t >= lattice.size())
    throw InputError("lattice endpoints are not set");
  if (lattice.s == lattice.t)
    throw InputError("lattice endpoints coincide");
  if (params.L0 < 1)
    throw DomainError("target length must be at least one bond");
  if (params.p < 0.0)
    throw DomainError("length tolerance must be non-negative");
  check_field(lattice, field, model);

  const int D = model.num_families;
  const double A = params.A ? *params.A : default_penalty(max_physical_coefficient(lattice, field, model), params.L0);
  if (!(A > 0.0))
    throw DomainError("penalty A must be positive");
  const double w = params.w ? *params.w : default_length_weight(A, params.L0, params.p);

  QuboProblem q(VariableRegistry::stage1(lattice, D));
  const auto &reg = q.registry();
  q.meta.stage = "stage1";
  q.meta.A = A;
  q.meta.w = w;
  q.meta.L0 = params.L0;
  q.meta.p = params.p;
  q.meta.D = D;
  q.meta.dims = lattice.dims;
  q.meta.s = lattice.s;
  q.meta.t = lattice.t;
  q.meta.literal_endpoint_signs = params.literal_endpoint_signs;

  // H_ext
  for (int i = 0; i < lattice.size(); ++i)
    for (int k = 0; k < D; ++k)
      q.add_linear(reg.site(i, k), field.relative(i, k));

  // H_int; the ancilla of a bond sits on its lower endpoint, which is i here.
  for (const auto &pr : pairs_within_cutoff(lattice.points, model.cutoff)) {
    int b = lattice.bond_index(pr.i, pr.j);
    for (int k = 0; k < D; ++k)
      for (int l = 0; l < D; ++l) {
        double u = model.lj_energy(k, l, pr.r);
        if (u == 0.0)
          continue;
        q.add_quadratic(reg.site(pr.i, k), reg.site(pr.j, l), u);
        if (b >= 0)
          q.add_quadratic(reg.ancilla(b, k), reg.site(pr.j, l), -u);
      }
  }

  // H_anc: 3a + xy - 2xa - 2ya is zero iff a = xy, positive otherwise.
  for (int b = 0; b < static_cast<int>(lattice.bonds.size()); ++b) {
    int i = lattice.bonds[static_cast<std::size_t>(b)].first;
    for (int k = 0; k < D; ++k) {
      int x = reg.site(i, k);
      int y = reg.bond(b);
      int a = reg.ancilla(b, k);
      q.add_linear(a, 3.0 * A);
      q.add_quadratic(x, y, A);
      q.add_quadratic(x, a, -2.0 * A);
      q.add_quadratic(y, a, -2.0 * A);
    }
  }

  // H_occ, ordered pairs k != l.
  for (int i = 0; i < lattice.size(); ++i)
    for (int k = 0; k < D; ++k)
      for (int l = k + 1; l < D; ++l)
        q.add_quadratic(reg.site(i, k), reg.site(i, l), 2.0 * A);

  // H_path
  auto occupancy = [&](int i, double weight) {
    std::vector<std::pair<int, double>> terms;
    for (int k = 0; k < D; ++k)
      terms.emplace_back(reg.site(i, k), weight);
    return terms;
  };
  auto degree_balance = [&](int i, double site_weight) {
    auto terms = occupancy(i, site_weight);
    for (int j : lattice.neighbors(i))
      terms.emplace_back(reg.bond(lattice.bond_index(i, j)), -1.0);
    return terms;
  };
  const double endpoint_sign = params.literal_endpoint_signs ? -1.0 : 1.0;
  for (int e : {lattice.s, lattice.t}) {
    q.add_squared(endpoint_sign * A, 1.0, occupancy(e, -1.0));
    q.add_squared(A, 0.0, degree_balance(e, 1.0));
  }
  for (int r = 0; r < lattice.size(); ++r) {
    if (r == lattice.s || r == lattice.t)
      continue;
    q.add_squared(A, 0.0, degree_balance(r, 2.0));
  }

  // H_length
  std::vector<std::pair<int, double>> bond_terms;
  for (int b = 0; b < static_cast<int>(lattice.bonds.size()); ++b)
    bond_terms.emplace_back(reg.bond(b), -1.0);
  q.add_squared(w, static_cast<double>(params.L0), bond_terms);

  return q;
}

void validate_path(const PocketLattice &lattice, const std::vector<int> &path) {
  if (path.empty())
    throw InputError("invalid path: empty");
  std::set<int> seen;
  for (std::size_t n = 0; n < path.size(); ++n) {
    if (path[n] < 0 || path[n] >= lattice.size())
      throw InputError("invalid path: point index out of range");
    if (!seen.insert(path[n]).second)
      throw InputError("invalid path: revisits point " + std::to_string(path[n]));
    if (n > 0 && lattice.bond_index(path[n - 1], path[n]) < 0)
      throw InputError("invalid path: points " + std::to_string(path[n - 1]) + " and " +
                       std::to_string(path[n]) + " are not adjacent");
  }
}

QuboProblem build_stage2_qubo(const PocketLattice &lattice, const std::vector<int> &path,
                              const ExternalField &field, const InteractionModel &model,
                              std::optional<double> A_opt) {
  validate_path(lattice, path);
  check_field(lattice, field, model);
  const int n = static_cast<int>(path.size());
  const int D = model.num_families;
  QuboProblem q(VariableRegistry::stage2(n, D));
  const auto &reg = q.registry();

  struct Contact {
    int m, n;
    double r;
  };
  std::vector<Contact> contacts;
  for (int a = 0; a < n; ++a)
    for (int b = a + 2; b < n; ++b) {
      double r = distance(lattice.points[static_cast<std::size_t>(path[static_cast<std::size_t>(a)])],
                          lattice.points[static_cast<std::size_t>(path[static_cast<std::size_t>(b)])]);
      if (r <= model.cutoff)
        contacts.push_back({a, b, r});
    }

  double max_phys = 0.0;
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < D; ++k) {
      double c = field.relative(path[static_cast<std::size_t>(a)], k);
      max_phys = std::max(max_phys, std::abs(c));
      q.add_linear(reg.position(a, k), c);
    }
  for (const auto &c : contacts)
    for (int k = 0; k < D; ++k)
      for (int l = 0; l < D; ++l) {
        double u = model.lj_energy(k, l, c.r);
        max_phys = std::max(max_phys, std::abs(u));
        if (u != 0.0)
          q.add_quadratic(reg.position(c.m, k), reg.position(c.n, l), u);
      }

  const double A = A_opt ? *A_opt : default_penalty(max_phys, n - 1);
  if (!(A > 0.0))
    throw DomainError("penalty A must be positive");
  for (int a = 0; a < n; ++a) {
    std::vector<std::pair<int, double>> terms;
    for (int k = 0; k < D; ++k)
      terms.emplace_back(reg.position(a, k), -1.0);
    q.add_squared(A, 1.0, terms);
  }

  q.meta.stage = "stage2";
  q.meta.A = A;
  q.meta.L0 = n - 1;
  q.meta.D = D;
  q.meta.dims = lattice.dims;
  q.meta.s = path.front();
  q.meta.t = path.back();
  return q;
}

namespace {

long long log2_ceil(long long v) {
  long long bits = 0;
  while ((1LL << bits) < v)
    ++bits;
  return bits;
}

} // namespace

ResourceCount count_variables(const std::array<int, 3> &dims, int D) {
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1 || D < 1)
    throw DomainError("lattice dimensions and alphabet size must be positive");
  const long long x = dims[0], y = dims[1], z = dims[2];
  ResourceCount rc;
  rc.bonds = (x - 1) * y * z + x * (y - 1) * z + x * y * (z - 1);
  rc.annealer = rc.bonds * (D + 1) + D * x * y * z;
  rc.gate = rc.bonds + log2_ceil(D + 1) * x * y * z;
  return rc;
}

ResourceCount count_variables(const PocketLattice &lattice, int D) {
  if (D < 1)
    throw DomainError("alphabet size must be positive");
  ResourceCount rc;
  const long long points = lattice.size();
  rc.bonds = static_cast<long long>(lattice.bonds.size());
  rc.annealer = rc.bonds * (D + 1) + D * points;
  rc.gate = rc.bonds + log2_ceil(D + 1) * points;
  return rc;
}

} // namespace pepqubo
