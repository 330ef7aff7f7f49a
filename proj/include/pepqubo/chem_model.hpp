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

// Residue alphabet, contact-energy tables, the three-branch Lennard-Jones
// pair potential and reduced-alphabet clustering.
//
// Units: energies in k_B T, distances in Angstrom.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pepqubo/common.hpp"

namespace pepqubo {

inline constexpr int kNumResidues = 20;

/// One-letter codes in matrix index order.
inline constexpr std::string_view kResidueCodes = "ACDEFGHIKLMNPQRSTVWY";

inline constexpr double kDefaultLambda = 0.159;
inline constexpr double kDefaultE0 = -2.27;
inline constexpr double kDefaultCutoff = 8.5;

/// A canonical amino acid, addressed by its stable index 0..19.
class AminoAcid {
public:
  constexpr AminoAcid() = default;
  constexpr explicit AminoAcid(int index) : index_(index) {}

  /// Throws InputError for anything that is not one of the 20 codes.
  static AminoAcid from_code(char code);
  /// Three-letter PDB residue name (e.g. "ALA"); common protonation-state
  /// aliases such as HID/HIE/CYX are accepted.
  static AminoAcid from_three_letter(std::string_view name);

  constexpr int index() const { return index_; }
  char code() const { return kResidueCodes[static_cast<std::size_t>(index_)]; }
  std::string three_letter() const;

  bool operator==(const AminoAcid &) const = default;

private:
  int index_ = 0;
};

using ResidueVector = std::array<double, kNumResidues>;

struct RawTables {
  SquareMatrix e{kNumResidues}; // MJ contact energies
  ResidueVector sigma{};        // vdW diameters
  ResidueVector f_surface{};    // surface frequencies, sum to 1
};

/// Throws InputError on asymmetry (> 1e-9), non-positive diameters or
/// non-normalized frequencies.
void validate_raw_tables(const RawTables &raw);

RawTables load_raw_tables(const std::filesystem::path &energies,
                          const std::filesystem::path &diameters,
                          const std::filesystem::path &frequencies);

/// Loads mj_contact_energies.txt, vdw_diameters.txt and
/// surface_frequencies.txt from `dir`.
RawTables load_raw_tables(const std::filesystem::path &dir);

/// Table directory: $PEPQUBO_DATA_DIR if set, else the compiled-in path.
std::filesystem::path default_data_dir();

/// epsilon_ij = lambda * (e_ij - e0). Throws DomainError for lambda <= 0.
SquareMatrix transform_epsilon(const SquareMatrix &e, double lambda = kDefaultLambda,
                               double e0 = kDefaultE0);

/// Three-branch LJ potential for a single pair. Exactly zero beyond cutoff.
/// Throws DomainError for r <= 0.
double lj_potential(double epsilon, double sigma, double r,
                    double cutoff = kDefaultCutoff);

struct ClusteringResult {
  int num_families = 0;
  std::array<int, kNumResidues> assignment{};
  double loss = 0.0;
  SquareMatrix e_clustered; // D x D cluster means of e
  std::vector<double> sigma_clustered;
};

/// Loss of a given assignment: sum_ij (e_ij - e'_{a(i)a(j)})^2 with e' the
/// cluster means. Every family in 0..D-1 must be used.
ClusteringResult evaluate_assignment(const RawTables &raw,
                                     const std::array<int, kNumResidues> &assignment,
                                     int num_families);

struct ClusteringOptions {
  int restarts = 64;
  std::uint64_t seed = 1;
};

/// Best-effort minimization of the clustering loss. D=1, D=2 and D=20 are
/// solved exactly; other sizes use multi-restart reassignment local search.
/// Deterministic for a fixed seed. Throws DomainError for D outside 1..20.
ClusteringResult cluster_alphabet(const RawTables &raw, int num_families,
                                  std::uint64_t seed = 1);
ClusteringResult cluster_alphabet(const RawTables &raw, int num_families,
                                  const ClusteringOptions &options);

/// Local search only, without exact shortcuts.
ClusteringResult cluster_local_search(const RawTables &raw, int num_families,
                                      const ClusteringOptions &options);

/// Exhaustive search over all bipartitions of the alphabet.
ClusteringResult cluster_exhaustive_bipartition(const RawTables &raw);

/// Partition canonicalized so that families are numbered by first
/// appearance in residue order; two results describe the same grouping iff
/// their canonical assignments are equal.
std::array<int, kNumResidues> canonical_partition(const std::array<int, kNumResidues> &a);

/// Interaction tables over an alphabet of D families.
struct InteractionModel {
  int num_families = 0;
  SquareMatrix epsilon;
  SquareMatrix sigma_pair;
  std::vector<double> sigma_family;
  std::vector<double> family_frequency; // summed surface frequencies
  double cutoff = kDefaultCutoff;
  double lambda = kDefaultLambda;
  double e0 = kDefaultE0;
  std::array<int, kNumResidues> cluster_map{};

  int family_of(AminoAcid aa) const { return cluster_map[static_cast<std::size_t>(aa.index())]; }

  /// Pair potential between families i and j at distance r.
  double lj_energy(int i, int j, double r) const;
};

InteractionModel reduce_model(const RawTables &raw, const ClusteringResult &clustering,
                              double cutoff = kDefaultCutoff, double lambda = kDefaultLambda,
                              double e0 = kDefaultE0);

/// The full 20-letter model (identity clustering).
InteractionModel full_model(const RawTables &raw, double cutoff = kDefaultCutoff,
                            double lambda = kDefaultLambda, double e0 = kDefaultE0);

/// Label of family k in reduced-alphabet sequences: '0'-'9' then 'a'-'j'.
char family_symbol(int family);

} // namespace pepqubo
