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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pepqubo/analysis.hpp"
#include "pepqubo/decode.hpp"
#include "pepqubo/pocket.hpp"
#include "pepqubo/qubo.hpp"
#include "pepqubo/solve.hpp"

namespace pepqubo {

inline constexpr const char *kToolVersion = "0.1.0";

/// Everything needed to reproduce a design run. Relative paths are
/// resolved against `base_dir` (the directory of the config file).
struct RunConfig {
  std::string structure;
  std::string chains;
  std::string reference_peptide; // PDB; its C-alphas give seeds and termini
  std::vector<Vec3> seeds;
  std::optional<std::array<Vec3, 2>> endpoints;
  std::string data_dir; // empty: the default table directory

  double spacing = kDefaultSpacing;
  double radius = kDefaultRadius;
  double cutoff = kDefaultCutoff;
  double clash_factor = kDefaultClashFactor;
  double lambda = kDefaultLambda;
  double e0 = kDefaultE0;

  int families = 5; // reduced alphabet size for stage 1
  int clustering_restarts = 64;
  std::uint64_t clustering_seed = 1;

  int L0 = 10;
  double p = 0.0;
  std::optional<double> A;
  std::optional<double> w;
  std::optional<double> stage2_A;
  bool literal_endpoint_signs = false;

  /// Fixed contact number; when absent it is estimated self-consistently.
  std::optional<double> contacts;
  double contact_tolerance = 0.10;
  int contact_max_iterations = 10;

  std::string solver = "sa";
  int restarts = 16;
  long long sweeps = 20000;
  int stage2_restarts = 8;
  long long stage2_sweeps = 20000;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  int designs = 1; // distinct stage-1 solutions refined at full alphabet
  int spectrum_bins = 20;

  bool scan_endpoints = false;
  int scan_limit = 16;

  std::string output_dir = "run";
  std::filesystem::path base_dir; // not serialized

  std::filesystem::path resolve(const std::string &p) const;
  /// Throws InputError when a referenced file is missing or a value is out
  /// of range.
  void validate() const;

  bool operator==(const RunConfig &) const;
};

nlohmann::json to_json(const RunConfig &c);
/// Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json &j);
RunConfig load_config(const std::filesystem::path &path);

struct RunRecord {
  SolveResult result;
  bool feasible = false;
  std::string sequence; // decoded labels, empty when no chain
  std::vector<int> path;
  std::vector<std::string> violations;
};

struct Design {
  std::vector<int> path;
  std::string family_sequence;
  std::string sequence; // full alphabet, s to t
  double stage1_energy = 0.0;
  double stage2_energy = 0.0;
  EnergyBreakdown energy; // direct evaluation with the full model
};

struct RunArchive {
  std::string version = kToolVersion;
  RunConfig config;
  ClusteringResult clustering;
  double contacts = 0.0;
  std::vector<double> contact_trace;
  PocketLattice lattice;
  ExternalField field;
  QuboProblem stage1;
  std::vector<RunRecord> stage1_runs;
  std::vector<std::pair<int, int>> scanned_endpoints;
  std::optional<QuboProblem> stage2; // problem of the best design
  std::vector<RunRecord> stage2_runs;
  std::vector<Design> designs;
};

nlohmann::json to_json(const RunArchive &a);
RunArchive archive_from_json(const nlohmann::json &j);
RunArchive load_archive(const std::filesystem::path &path);

class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Decodes every result of a stage-1 problem.
std::vector<RunRecord> decode_runs(const std::vector<SolveResult> &results,
                                   const QuboProblem &problem, const PocketLattice &lattice);

/// Index of the best feasible record: lowest energy, ties by lexicographic
/// bit order. nullopt when none is feasible.
std::optional<std::size_t> best_feasible(const std::vector<RunRecord> &runs);

/// Stage 1 (reduced alphabet, joint pose and sequence), stage 2 (full
/// alphabet on the frozen chain), then writes the output directory:
/// designs.fasta, poses.pdb, lattice.json, stage1_qubo.json,
/// stage1_ising.json, stage2_qubo.json, spectrum.csv, archive.json.
/// Throws InfeasibleError when stage 1 finds no feasible chain.
RunArchive cmd_pipeline(const RunConfig &config, std::ostream *log = nullptr);

/// Text summary plus report.tsv and spectrum.csv in `out_dir` (if
/// non-empty).
void cmd_report(const RunArchive &archive, std::ostream &out,
                const std::filesystem::path &out_dir = {});

/// Boundary points (fewer than six neighbors) paired so that a chain of L0
/// bonds can join them on the cubic lattice, in index order, at most
/// `limit` pairs.
std::vector<std::pair<int, int>> endpoint_candidates(const PocketLattice &lattice, int L0,
                                                     int limit);

/// {"results": [{bits, energy, solver, restart_id, seed}, ...]}; wall
/// time is left out so that output files are reproducible.
nlohmann::json results_to_json(const std::vector<SolveResult> &results);
std::vector<SolveResult> results_from_json(const nlohmann::json &j);

std::string bits_to_string(const Bits &bits);
Bits bits_from_string(const std::string &s);

} // namespace pepqubo
