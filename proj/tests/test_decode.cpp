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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "pepqubo/decode.hpp"
#include "pepqubo/solve.hpp"
#include "test_support.hpp"

using namespace pepqubo;
using testing::bits_of;
using testing::box_lattice;

namespace {

ProblemMeta meta_for(const PocketLattice &l, int L0, double p = 0.0) {
  ProblemMeta m;
  m.s = l.s;
  m.t = l.t;
  m.L0 = L0;
  m.p = p;
  return m;
}

void set_bond(Bits &x, const VariableRegistry &reg, const PocketLattice &l, int i, int j,
              const std::vector<int> &family_of_point) {
  int b = l.bond_index(i, j);
  REQUIRE(b >= 0);
  x[static_cast<std::size_t>(reg.bond(b))] = 1;
  int lower = std::min(i, j);
  int k = family_of_point[static_cast<std::size_t>(lower)];
  if (k >= 0)
    x[static_cast<std::size_t>(reg.ancilla(b, k))] = 1;
}

// Components of the active-bond graph that are simple cycles and do not
// contain s.
std::set<std::vector<int>> cycle_oracle(const Bits &x, const VariableRegistry &reg,
                                        const PocketLattice &l, const std::set<int> &exclude) {
  const int n = l.size();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (std::size_t b = 0; b < l.bonds.size(); ++b)
    if (x[static_cast<std::size_t>(reg.bond(static_cast<int>(b)))]) {
      adj[static_cast<std::size_t>(l.bonds[b].first)].push_back(l.bonds[b].second);
      adj[static_cast<std::size_t>(l.bonds[b].second)].push_back(l.bonds[b].first);
    }
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::set<std::vector<int>> out;
  for (int v = 0; v < n; ++v) {
    if (comp[static_cast<std::size_t>(v)] >= 0 || adj[static_cast<std::size_t>(v)].empty())
      continue;
    std::vector<int> members{v};
    comp[static_cast<std::size_t>(v)] = v;
    for (std::size_t h = 0; h < members.size(); ++h)
      for (int u : adj[static_cast<std::size_t>(members[h])])
        if (comp[static_cast<std::size_t>(u)] < 0) {
          comp[static_cast<std::size_t>(u)] = v;
          members.push_back(u);
        }
    std::size_t edges = 0;
    bool all_two = true;
    bool excluded = false;
    for (int m : members) {
      edges += adj[static_cast<std::size_t>(m)].size();
      all_two &= adj[static_cast<std::size_t>(m)].size() == 2;
      excluded |= exclude.count(m) != 0;
    }
    if (!excluded && all_two && edges / 2 == members.size()) {
      std::sort(members.begin(), members.end());
      out.insert(members);
    }
  }
  return out;
}

} // namespace

TEST_CASE("all-zero bits are infeasible") {
  auto l = box_lattice(1, 3, 1);
  auto reg = VariableRegistry::stage1(l, 1);
  auto d = decode_bits(Bits(static_cast<std::size_t>(reg.total()), 0), reg, l, meta_for(l, 2));
  CHECK_FALSE(d.feasible());
  CHECK_FALSE(d.peptide.has_value());
  CHECK_FALSE(d.report.endpoints_ok);
  CHECK_FALSE(d.report.length_ok);
  CHECK(d.report.active_bonds == 0);
  CHECK_THROWS_AS(decode_bits(Bits(3, 0), reg, l, meta_for(l, 2)), DomainError);
}

TEST_CASE("hand-built chain on a line") {
  auto l = box_lattice(1, 3, 1);
  auto reg = VariableRegistry::stage1(l, 1);
  Bits x = encode_chain(reg, l, {0, 1, 2}, {0, 0, 0});
  auto d = decode_bits(x, reg, l, meta_for(l, 2));
  REQUIRE(d.feasible());
  CHECK(d.peptide->path == std::vector<int>{0, 1, 2});
  CHECK(d.peptide->length == 2);
  CHECK(d.peptide->sequence() == "000");
  CHECK(d.report.violations.empty());
}

TEST_CASE("chain plus a detached square") {
  // 3x2x2 box, index = 4x + 2y + z; s = 0, t = 11.
  auto l = box_lattice(3, 2, 2);
  auto reg = VariableRegistry::stage1(l, 2);
  std::vector<int> fam(static_cast<std::size_t>(l.size()), -1);
  std::vector<int> chain{0, 4, 8, 9, 11};
  std::vector<int> ring{2, 3, 7, 6};
  Bits x(static_cast<std::size_t>(reg.total()), 0);
  for (int v : chain)
    fam[static_cast<std::size_t>(v)] = 1;
  for (int v : ring)
    fam[static_cast<std::size_t>(v)] = 0;
  for (int v = 0; v < l.size(); ++v)
    if (fam[static_cast<std::size_t>(v)] >= 0)
      x[static_cast<std::size_t>(reg.site(v, fam[static_cast<std::size_t>(v)]))] = 1;
  for (std::size_t n = 1; n < chain.size(); ++n)
    set_bond(x, reg, l, chain[n - 1], chain[n], fam);
  for (std::size_t n = 0; n < ring.size(); ++n)
    set_bond(x, reg, l, ring[n], ring[(n + 1) % ring.size()], fam);

  auto d = decode_bits(x, reg, l, meta_for(l, 4));
  REQUIRE(d.peptide.has_value());
  CHECK(d.peptide->path == chain);
  REQUIRE(d.report.ring_components.size() == 1);
  CHECK(d.report.ring_components[0] == std::vector<int>{2, 3, 6, 7});
  CHECK(d.report.degree_ok);
  CHECK(d.report.ancilla_ok);
  CHECK_FALSE(d.report.length_ok); // rings count towards the bond total
  CHECK_FALSE(d.feasible());
}

TEST_CASE("violations are named") {
  auto l = box_lattice(2, 2, 1); // 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
  auto reg = VariableRegistry::stage1(l, 2);
  Bits good = encode_chain(reg, l, {0, 1, 3}, {0, 1, 0});

  SUBCASE("double occupancy") {
    Bits x = good;
    x[static_cast<std::size_t>(reg.site(1, 0))] = 1;
    auto d = decode_bits(x, reg, l, meta_for(l, 2));
    CHECK_FALSE(d.report.occupancy_ok);
    CHECK_FALSE(d.feasible());
  }
  SUBCASE("wrong ancilla") {
    Bits x = good;
    x[static_cast<std::size_t>(reg.ancilla(l.bond_index(0, 1), 1))] = 1;
    auto d = decode_bits(x, reg, l, meta_for(l, 2));
    CHECK_FALSE(d.report.ancilla_ok);
    CHECK(d.peptide.has_value());
  }
  SUBCASE("branch") {
    Bits x = good;
    x[static_cast<std::size_t>(reg.site(2, 0))] = 1;
    x[static_cast<std::size_t>(reg.bond(l.bond_index(0, 2)))] = 1;
    x[static_cast<std::size_t>(reg.ancilla(l.bond_index(0, 2), 0))] = 1;
    auto d = decode_bits(x, reg, l, meta_for(l, 3));
    CHECK_FALSE(d.report.degree_ok);
    CHECK_FALSE(d.peptide.has_value());
  }
  SUBCASE("length outside tolerance") {
    auto d = decode_bits(good, reg, l, meta_for(l, 3));
    CHECK(d.peptide.has_value());
    CHECK_FALSE(d.report.length_ok);
    auto tol = decode_bits(good, reg, l, meta_for(l, 3, 0.34));
    CHECK(tol.feasible());
  }
}

TEST_CASE("encode then decode is the identity on random chains") {
  auto l = box_lattice(3, 3, 2);
  std::mt19937_64 rng(8);
  int tested = 0;
  for (int trial = 0; trial < 300; ++trial) {
    // Random self-avoiding walk from a random start.
    std::vector<int> path{static_cast<int>(rng() % static_cast<unsigned>(l.size()))};
    std::set<int> used{path[0]};
    int steps = 1 + static_cast<int>(rng() % 8);
    for (int s = 0; s < steps; ++s) {
      std::vector<int> options;
      for (int j : l.neighbors(path.back()))
        if (!used.count(j))
          options.push_back(j);
      if (options.empty())
        break;
      int next = options[rng() % options.size()];
      path.push_back(next);
      used.insert(next);
    }
    if (path.size() < 2)
      continue;
    const int D = 3;
    std::vector<int> fam;
    for (std::size_t n = 0; n < path.size(); ++n)
      fam.push_back(static_cast<int>(rng() % D));
    auto reg = VariableRegistry::stage1(l, D);
    auto lat = l;
    lat.s = path.front();
    lat.t = path.back();
    Bits x = encode_chain(reg, lat, path, fam);
    auto d = decode_bits(x, reg, lat, meta_for(lat, static_cast<int>(path.size()) - 1));
    REQUIRE(d.feasible());
    CHECK(d.peptide->path == path);
    CHECK(d.peptide->families == fam);
    ++tested;
  }
  CHECK(tested > 200);
}

TEST_CASE("ring detection matches a cycle oracle on every 2x2 assignment") {
  auto l = box_lattice(2, 2, 1);
  auto reg = VariableRegistry::stage1(l, 1);
  const int n = reg.total();
  REQUIRE(n == 12);
  int with_rings = 0;
  for (std::uint64_t m = 0; m < (1ull << n); ++m) {
    Bits x = bits_of(m, n);
    auto d = decode_bits(x, reg, l, meta_for(l, 2));
    std::set<int> chain;
    if (d.peptide)
      chain.insert(d.peptide->path.begin(), d.peptide->path.end());
    auto expect = cycle_oracle(x, reg, l, chain);
    std::set<std::vector<int>> got(d.report.ring_components.begin(),
                                   d.report.ring_components.end());
    CHECK(got == expect);
    with_rings += !got.empty();
  }
  CHECK(with_rings > 0);
}

TEST_CASE("feasible assignments score as direct energy plus the length penalty") {
  struct Shape {
    int lx, ly, D, L0;
    double p;
  };
  for (auto [lx, ly, D, L0, p] : {Shape{1, 3, 2, 2, 0.0}, Shape{2, 2, 1, 2, 0.5}, Shape{1, 3, 1, 2, 0.5}}) {
    Stage1Params params;
    params.L0 = L0;
    params.p = p;
    auto in = testing::stage1_instance(lx, ly, 1, D, params);
    const int n = in.problem.num_vars();
    int feasible = 0;
    for (std::uint64_t m = 0; m < (1ull << n); ++m) {
      Bits x = bits_of(m, n);
      auto d = decode_bits(x, in.problem.registry(), in.lattice, in.problem.meta);
      if (!d.feasible())
        continue;
      ++feasible;
      auto e = energy_direct(*d.peptide, in.lattice, in.field, in.model);
      double length_penalty = in.problem.meta.w * (L0 - d.peptide->length) * (L0 - d.peptide->length);
      CHECK(std::abs(e.physical() + length_penalty - in.problem.energy(x)) <= 1e-9);
      // Feasible states carry no bonded interaction.
      auto t = testing::stage1_terms(x, in.problem.registry(), in.lattice, in.field, in.model,
                                     in.problem.meta);
      CHECK(t.anc == 0.0);
      CHECK(t.occ == 0.0);
      CHECK(t.path == 0.0);
    }
    CHECK(feasible > 0);
  }
}

TEST_CASE("ground state of the line fixture") {
  Stage1Params params;
  params.L0 = 2;
  auto in = testing::stage1_instance(1, 3, 1, 1, params);
  auto r = solve_exact(in.problem);
  auto d = decode_bits(r.bits, in.problem.registry(), in.lattice, in.problem.meta);
  REQUIRE(d.feasible());
  CHECK(d.peptide->path == std::vector<int>{0, 1, 2});
  auto e = energy_direct(*d.peptide, in.lattice, in.field, in.model);
  CHECK(std::abs(e.physical() - r.energy) <= 1e-9);
}

TEST_CASE("direct energy special cases") {
  auto l = box_lattice(1, 3, 1);
  auto model = testing::model_with(2);
  ProteinStructure far;
  Residue res;
  res.type = AminoAcid::from_code('L');
  res.ca = {100, 100, 100};
  far.residues.push_back(res);
  auto field = compute_external_field(l, far, model, 0.0);
  DecodedPeptide one;
  one.path = {1};
  one.families = {0};
  CHECK(energy_direct(one, l, field, model).physical() == 0.0);
  DecodedPeptide two;
  two.path = {0, 1};
  two.families = {1, 1};
  CHECK(energy_direct(two, l, field, model).internal == 0.0);
  DecodedPeptide three;
  three.path = {0, 1, 2};
  three.families = {1, 0, 1};
  CHECK(energy_direct(three, l, field, model).internal == model.lj_energy(1, 1, 7.6));
  DecodedPeptide broken;
  broken.path = {0, 2};
  broken.families = {0, 0};
  CHECK_THROWS_AS(energy_direct(broken, l, field, model), InputError);
  CHECK_THROWS_AS(energy_direct(DecodedPeptide{}, l, field, model), InputError);
}

TEST_CASE("stage-2 label decoding") {
  auto reg = VariableRegistry::stage2(3, 20);
  auto x = encode_positions(reg, {4, 0, 19});
  CHECK(decode_positions(x, reg) == std::vector<int>{4, 0, 19});
  x[static_cast<std::size_t>(reg.position(1, 5))] = 1;
  CHECK_FALSE(decode_positions(x, reg).has_value());
  CHECK_FALSE(decode_positions(Bits(60, 0), reg).has_value());
}

TEST_CASE("random peptides") {
  auto a = random_peptides(10, 30, 1);
  CHECK(a.size() == 30);
  for (const auto &s : a)
    CHECK(s.size() == 10);
  CHECK(a == random_peptides(10, 30, 1));
  CHECK(a != random_peptides(10, 30, 2));
  CHECK_THROWS_AS(random_peptides(0, 3, 1), DomainError);

  auto many = random_peptides(100, 1000, 7);
  std::map<char, int> counts;
  for (const auto &s : many)
    for (char c : s)
      ++counts[c];
  const double n = 1e5, p = 1.0 / 20;
  const double sd = std::sqrt(n * p * (1 - p));
  CHECK(counts.size() == 20);
  for (const auto &[c, k] : counts) {
    CAPTURE(c);
    CHECK(std::abs(k - n * p) <= 3 * sd);
  }
}

TEST_CASE("sequence files") {
  std::ostringstream out;
  std::string long_seq(130, 'A');
  write_fasta(out, {{"one", "ACDE"}, {"two", long_seq}});
  std::string text = out.str();
  CHECK(text.find(">one\nACDE\n>two\n" + std::string(60, 'A') + "\n") == 0);
  std::istringstream in(text);
  auto back = read_sequences(in);
  REQUIRE(back.size() == 2);
  CHECK(back[1] == long_seq);

  std::istringstream plain("# comment\nacdef\n\nKLMNP\n");
  CHECK(read_sequences(plain) == std::vector<std::string>{"ACDEF", "KLMNP"});
  std::istringstream bad("ACDXZ\n");
  CHECK_THROWS_AS(read_sequences(bad), InputError);
  std::istringstream orphan(">a\nAC\n");
  CHECK(read_sequences(orphan).size() == 1);
}

TEST_CASE("pose records") {
  auto l = box_lattice(1, 3, 1);
  DecodedPeptide p;
  p.path = {0, 1};
  p.families = {3, 12};
  auto recs = pose_records(p, l);
  CHECK(recs[0].name == "F03");
  CHECK(recs[1].position == l.points[1]);
  p.full_alphabet = true;
  recs = pose_records(p, l);
  CHECK(recs[0].name == "GLU");
  CHECK(recs[1].name == "PRO");
}
