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

#include "pepqubo/decode.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

namespace pepqubo {

std::string DecodedPeptide::sequence() const {
  std::string out;
  out.reserve(families.size());
  for (int f : families)
    out.push_back(full_alphabet ? AminoAcid(f).code() : family_symbol(f));
  return out;
}

DecodeResult decode_bits(const Bits &bits, const VariableRegistry &registry,
                         const PocketLattice &lattice, const ProblemMeta &meta) {
  if (static_cast<int>(bits.size()) != registry.total())
    throw DomainError("assignment length does not match the registry");
  if (registry.num_points() != lattice.size() ||
      registry.num_bonds() != static_cast<int>(lattice.bonds.size()))
    throw DomainError("registry does not describe this lattice");

  const int D = registry.num_families();
  const int n = lattice.size();
  const int s = meta.s >= 0 ? meta.s : lattice.s;
  const int t = meta.t >= 0 ? meta.t : lattice.t;
  auto bit = [&](int v) { return bits[static_cast<std::size_t>(v)] != 0; };

  DecodeResult out;
  FeasibilityReport &rep = out.report;

  std::vector<int> family(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    int count = 0;
    for (int k = 0; k < D; ++k)
      if (bit(registry.site(i, k))) {
        if (count++ == 0)
          family[static_cast<std::size_t>(i)] = k;
      }
    if (count > 1) {
      rep.occupancy_ok = false;
      rep.violations.push_back("site " + std::to_string(i) + " holds " + std::to_string(count) +
                               " families");
    }
  }

  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  std::vector<char> active(lattice.bonds.size(), 0);
  for (std::size_t b = 0; b < lattice.bonds.size(); ++b) {
    auto [i, j] = lattice.bonds[b];
    active[b] = bit(registry.bond(static_cast<int>(b)));
    if (active[b]) {
      ++rep.active_bonds;
      ++degree[static_cast<std::size_t>(i)];
      ++degree[static_cast<std::size_t>(j)];
    }
    for (int k = 0; k < D; ++k) {
      bool expected = active[b] && bit(registry.site(i, k));
      if (bit(registry.ancilla(static_cast<int>(b), k)) != expected) {
        rep.ancilla_ok = false;
        rep.violations.push_back("ancilla of bond " + std::to_string(i) + "-" + std::to_string(j) +
                                 " family " + std::to_string(k) + " inconsistent");
      }
    }
  }

  auto occupied = [&](int i) { return family[static_cast<std::size_t>(i)] >= 0; };
  for (int i = 0; i < n; ++i) {
    int d = degree[static_cast<std::size_t>(i)];
    int want = !occupied(i) ? 0 : (i == s || i == t) ? 1 : 2;
    if (d != want) {
      rep.degree_ok = false;
      rep.violations.push_back("site " + std::to_string(i) + " has degree " + std::to_string(d) +
                               ", expected " + std::to_string(want));
    }
  }

  // Walk the chain from s.
  std::vector<char> on_chain(static_cast<std::size_t>(n), 0);
  std::vector<int> path;
  bool chain_ok = occupied(s) && occupied(t);
  if (chain_ok) {
    int prev = -1;
    int cur = s;
    while (true) {
      path.push_back(cur);
      on_chain[static_cast<std::size_t>(cur)] = 1;
      if (cur == t)
        break;
      int next = -1;
      int options = 0;
      for (int j : lattice.neighbors(cur)) {
        if (j == prev || !active[static_cast<std::size_t>(lattice.bond_index(cur, j))])
          continue;
        ++options;
        next = j;
      }
      if (options != 1 || on_chain[static_cast<std::size_t>(next)] || !occupied(next) ||
          (cur == s && degree[static_cast<std::size_t>(s)] != 1)) {
        chain_ok = false;
        break;
      }
      prev = cur;
      cur = next;
    }
    if (chain_ok && degree[static_cast<std::size_t>(t)] != 1)
      chain_ok = false;
  }
  if (!chain_ok) {
    std::fill(on_chain.begin(), on_chain.end(), 0);
    rep.endpoints_ok = false;
    rep.violations.push_back("no single chain joins s=" + std::to_string(s) +
                             " and t=" + std::to_string(t));
  }

  // Cycles among the remaining active bonds.
  std::vector<char> seen(on_chain);
  for (int start = 0; start < n; ++start) {
    if (seen[static_cast<std::size_t>(start)] || degree[static_cast<std::size_t>(start)] == 0)
      continue;
    std::vector<int> component;
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      component.push_back(v);
      for (int j : lattice.neighbors(v))
        if (active[static_cast<std::size_t>(lattice.bond_index(v, j))] &&
            !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          stack.push_back(j);
        }
    }
    bool cycle = component.size() >= 4 &&
                 std::all_of(component.begin(), component.end(), [&](int v) {
                   return degree[static_cast<std::size_t>(v)] == 2;
                 });
    std::sort(component.begin(), component.end());
    if (cycle) {
      rep.ring_components.push_back(component);
      rep.violations.push_back("detached ring of " + std::to_string(component.size()) + " beads");
    } else {
      rep.violations.push_back("stray fragment of " + std::to_string(component.size()) + " beads");
      rep.degree_ok = false;
    }
  }

  const double lo = meta.L0 * (1.0 - meta.p) - 1e-9;
  const double hi = meta.L0 * (1.0 + meta.p) + 1e-9;
  if (rep.active_bonds < lo || rep.active_bonds > hi) {
    rep.length_ok = false;
    rep.violations.push_back("length " + std::to_string(rep.active_bonds) + " outside target " +
                             std::to_string(meta.L0));
  }

  if (chain_ok) {
    DecodedPeptide pep;
    pep.path = path;
    for (int v : path)
      pep.families.push_back(family[static_cast<std::size_t>(v)]);
    pep.length = static_cast<int>(path.size()) - 1;
    pep.full_alphabet = D == kNumResidues;
    out.peptide = std::move(pep);
  }
  return out;
}

std::optional<std::vector<int>> decode_positions(const Bits &bits, const VariableRegistry &registry) {
  if (static_cast<int>(bits.size()) != registry.total())
    throw DomainError("assignment length does not match the registry");
  std::vector<int> labels;
  for (int n = 0; n < registry.num_positions(); ++n) {
    int label = -1;
    int count = 0;
    for (int k = 0; k < registry.num_families(); ++k)
      if (bits[static_cast<std::size_t>(registry.position(n, k))]) {
        label = k;
        ++count;
      }
    if (count != 1)
      return std::nullopt;
    labels.push_back(label);
  }
  return labels;
}

Bits encode_chain(const VariableRegistry &registry, const PocketLattice &lattice,
                  const std::vector<int> &path, const std::vector<int> &families) {
  if (path.size() != families.size())
    throw DomainError("path and labels differ in length");
  validate_path(lattice, path);
  Bits bits(static_cast<std::size_t>(registry.total()), 0);
  std::vector<int> family(static_cast<std::size_t>(lattice.size()), -1);
  for (std::size_t n = 0; n < path.size(); ++n) {
    family[static_cast<std::size_t>(path[n])] = families[n];
    bits[static_cast<std::size_t>(registry.site(path[n], families[n]))] = 1;
  }
  for (std::size_t n = 1; n < path.size(); ++n) {
    int b = lattice.bond_index(path[n - 1], path[n]);
    bits[static_cast<std::size_t>(registry.bond(b))] = 1;
    int lower = lattice.bonds[static_cast<std::size_t>(b)].first;
    bits[static_cast<std::size_t>(registry.ancilla(b, family[static_cast<std::size_t>(lower)]))] = 1;
  }
  return bits;
}

Bits encode_positions(const VariableRegistry &registry, const std::vector<int> &labels) {
  Bits bits(static_cast<std::size_t>(registry.total()), 0);
  for (std::size_t n = 0; n < labels.size(); ++n)
    bits[static_cast<std::size_t>(registry.position(static_cast<int>(n), labels[n]))] = 1;
  return bits;
}

EnergyBreakdown energy_direct(const DecodedPeptide &peptide, const PocketLattice &lattice,
                              const ExternalField &field, const InteractionModel &model) {
  if (peptide.path.empty() || peptide.path.size() != peptide.families.size())
    throw InputError("energy requires a decoded chain with one label per bead");
  validate_path(lattice, peptide.path);
  EnergyBreakdown e;
  const std::size_t n = peptide.path.size();
  for (std::size_t a = 0; a < n; ++a)
    e.external += field.relative(peptide.path[a], peptide.families[a]);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 2; b < n; ++b) {
      double r = distance(lattice.points[static_cast<std::size_t>(peptide.path[a])],
                          lattice.points[static_cast<std::size_t>(peptide.path[b])]);
      e.internal += model.lj_energy(peptide.families[a], peptide.families[b], r);
    }
  return e;
}

std::vector<std::string> random_peptides(int length, int count, std::uint64_t seed) {
  if (length < 1)
    throw DomainError("peptide length must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    std::string s;
    for (int p = 0; p < length; ++p)
      s.push_back(kResidueCodes[static_cast<std::size_t>(rng() % kNumResidues)]);
    out.push_back(std::move(s));
  }
  return out;
}

void write_fasta(std::ostream &out,
                 const std::vector<std::pair<std::string, std::string>> &records) {
  for (const auto &[header, seq] : records) {
    out << '>' << header << '\n';
    for (std::size_t i = 0; i < seq.size(); i += 60)
      out << seq.substr(i, 60) << '\n';
  }
}

std::vector<std::string> read_sequences(std::istream &in) {
  std::vector<std::string> out;
  std::string line;
  bool fasta = false;
  bool open = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    if (line[0] == '>') {
      fasta = true;
      out.emplace_back();
      open = true;
      continue;
    }
    std::string seq;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c)))
        seq.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (fasta) {
      if (!open)
        throw InputError("sequence data before the first FASTA header");
      out.back() += seq;
    } else {
      out.push_back(seq);
    }
  }
  for (const auto &s : out)
    for (char c : s)
      (void)AminoAcid::from_code(c);
  return out;
}

std::vector<std::string> read_sequences(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open sequence file: " + path.string());
  return read_sequences(in);
}

std::vector<CaRecord> pose_records(const DecodedPeptide &peptide, const PocketLattice &lattice) {
  std::vector<CaRecord> out;
  for (std::size_t n = 0; n < peptide.path.size(); ++n) {
    CaRecord rec;
    if (peptide.full_alphabet) {
      rec.name = AminoAcid(peptide.families[n]).three_letter();
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "F%02d", peptide.families[n]);
      rec.name = buf;
    }
    rec.position = lattice.points[static_cast<std::size_t>(peptide.path[n])];
    out.push_back(std::move(rec));
  }
  return out;
}

} // namespace pepqubo
