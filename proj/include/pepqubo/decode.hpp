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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pepqubo/pocket.hpp"
#include "pepqubo/qubo.hpp"

namespace pepqubo {

struct EnergyBreakdown {
  double external = 0.0;
  double internal = 0.0;
  double penalty = 0.0; // objective minus the physical part

  double physical() const { return external + internal; }
};

/// Chain from s to t with one label per bead. Labels are families of the
/// model the chain was decoded against; for the full alphabet they are
/// residue indices.
struct DecodedPeptide {
  std::vector<int> path;
  std::vector<int> families;
  int length = 0; // bonds along the chain
  bool full_alphabet = false;
  EnergyBreakdown energy;

  /// One-letter residue codes for the full alphabet, family symbols
  /// otherwise.
  std::string sequence() const;
};

struct FeasibilityReport {
  bool occupancy_ok = true; // no site holds two families
  bool ancilla_ok = true;   // every ancilla equals site AND bond
  bool degree_ok = true;    // endpoints degree 1, inner beads 2, empty sites 0
  bool endpoints_ok = true; // s and t occupied and joined by one chain
  bool length_ok = true;    // active bonds within [L0(1-p), L0(1+p)]
  int active_bonds = 0;
  std::vector<std::vector<int>> ring_components;
  std::vector<std::string> violations;

  bool feasible() const {
    return occupancy_ok && ancilla_ok && degree_ok && endpoints_ok && length_ok &&
           ring_components.empty();
  }
};

struct DecodeResult {
  /// Present whenever a well-formed s-t chain exists, even if the report
  /// flags problems elsewhere (e.g. detached rings).
  std::optional<DecodedPeptide> peptide;
  FeasibilityReport report;

  bool feasible() const { return peptide.has_value() && report.feasible(); }
};

/// Reads a stage-1 assignment. Infeasibility is reported, never thrown;
/// only a length mismatch between bits and registry throws DomainError.
DecodeResult decode_bits(const Bits &bits, const VariableRegistry &registry,
                         const PocketLattice &lattice, const ProblemMeta &meta);

/// Reads a stage-2 assignment: one label per position, or nullopt unless
/// every position has exactly one label set.
std::optional<std::vector<int>> decode_positions(const Bits &bits, const VariableRegistry &registry);

/// Inverse of decode_bits for a chain: sites, bonds and consistent
/// ancillas.
Bits encode_chain(const VariableRegistry &registry, const PocketLattice &lattice,
                  const std::vector<int> &path, const std::vector<int> &families);

/// Inverse of decode_positions.
Bits encode_positions(const VariableRegistry &registry, const std::vector<int> &labels);

/// External plus non-bonded internal energy of a chain, computed directly
/// from the model (no QUBO involved). `penalty` is left at 0.
EnergyBreakdown energy_direct(const DecodedPeptide &peptide, const PocketLattice &lattice,
                              const ExternalField &field, const InteractionModel &model);

/// Uniform random sequences over the 20 residues.
std::vector<std::string> random_peptides(int length, int count, std::uint64_t seed);

/// FASTA records, 60 residues per line.
void write_fasta(std::ostream &out, const std::vector<std::pair<std::string, std::string>> &records);

/// FASTA, or plain text with one sequence per line ('#' starts a comment).
std::vector<std::string> read_sequences(const std::filesystem::path &path);
std::vector<std::string> read_sequences(std::istream &in);

/// Bead labels as PDB residue names: three-letter codes for the full
/// alphabet, "Fnn" for reduced families.
std::vector<CaRecord> pose_records(const DecodedPeptide &peptide, const PocketLattice &lattice);

} // namespace pepqubo
