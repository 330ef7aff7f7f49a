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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pepqubo/chem_model.hpp"
#include "pepqubo/structure.hpp"

namespace pepqubo {

struct PoseRecord {
  int rank = 1; // 1 = best scored
  std::vector<Vec3> positions;
  std::string label;
};

/// Multi-model PDB (one MODEL per pose, C-alpha atoms only, rank = model
/// order) or the plain format:
///
///   POSE <label>
///   x y z
///   ...
///
/// The format is detected from the first non-comment line.
std::vector<PoseRecord> read_poses(const std::filesystem::path &path);
std::vector<PoseRecord> read_poses(std::istream &in);

/// (peptide position, protein residue index) pairs.
struct ContactSet {
  std::set<std::pair<int, int>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  bool contains(int position, int residue) const { return pairs.count({position, residue}) != 0; }
};

/// C-alpha pairs within `cutoff` (inclusive). Throws InputError for an
/// empty pose.
ContactSet pose_contacts(const PoseRecord &pose, const ProteinStructure &protein,
                         double cutoff = kDefaultCutoff);
ContactSet native_contacts(const PoseRecord &reference, const ProteinStructure &protein,
                           double cutoff = kDefaultCutoff);

/// |contacts(pose) ∩ native| / |native|. Throws DomainError for an empty
/// native set.
double f_nat(const ContactSet &pose_contacts, const ContactSet &native);
double f_nat(const PoseRecord &pose, const ContactSet &native, const ProteinStructure &protein,
             double cutoff = kDefaultCutoff);

struct PrCurve {
  std::vector<std::pair<double, double>> points; // (recall, precision) per prefix
  std::vector<bool> labels;                      // positive flag in rank order
  double auc = 0.0;
  int positives = 0;
  bool no_positives = false; // auc forced to 0
};

/// Sweeps the ranked list one prefix at a time; auc is the step sum
/// of (recall_k - recall_{k-1}) * precision_k.
PrCurve pr_curve(const std::vector<bool> &labels);

/// Labels each pose positive when f_nat > threshold, ordered by rank.
PrCurve pr_auc(const std::vector<PoseRecord> &poses, const ContactSet &native,
               const ProteinStructure &protein, double threshold = 0.5,
               double cutoff = kDefaultCutoff);

/// Per position relative frequency of each family.
struct FrequencyTable {
  int num_families = 0;
  std::vector<std::vector<double>> rows;

  int positions() const { return static_cast<int>(rows.size()); }
};

FrequencyTable family_histogram(const std::vector<std::string> &sequences,
                                const std::array<int, kNumResidues> &assignment,
                                int num_families, int positions);
FrequencyTable family_histogram(const std::vector<std::string> &sequences,
                                const ClusteringResult &clustering, int positions);

/// Families of a row sorted by frequency, ties to the lower index.
std::vector<int> ranked_families(const std::vector<double> &row);

struct Top2Result {
  std::vector<bool> pass;
  int count = 0;
};

/// Per position: is the reference's most frequent family among the two
/// most frequent designed families?
Top2Result top2_containment(const FrequencyTable &designed, const FrequencyTable &reference);

struct MevSpectrum {
  std::vector<double> edges; // bins + 1 edges
  std::vector<int> counts;
  double min = 0.0;
  double mean = 0.0;
  int distinct_sequences = 0;
  int samples = 0;
};

/// Histogram of energies. `sequences` holds the decoded sequence per
/// result (empty when undecodable); it may be empty as a whole. All
/// energies equal gives one bin.
MevSpectrum mev_spectrum(const std::vector<double> &energies,
                         const std::vector<std::string> &sequences, int bins);

void write_pr_csv(std::ostream &out, const PrCurve &curve);
void write_histogram_csv(std::ostream &out, const FrequencyTable &table);
void write_spectrum_csv(std::ostream &out, const MevSpectrum &spectrum);
/// Tab-separated comparison of two tables with per-position top-2 flags.
void write_comparison_tsv(std::ostream &out, const FrequencyTable &designed,
                          const FrequencyTable &reference, const Top2Result &top2);

} // namespace pepqubo
