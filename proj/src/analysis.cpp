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

#include "pepqubo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace pepqubo {

namespace {

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double coordinate(const std::string &line, std::size_t at, int line_no) {
  try {
    std::size_t used = 0;
    std::string field = trim(line.substr(at, 8));
    double v = std::stod(field, &used);
    if (used != field.size())
      throw std::invalid_argument(field);
    return v;
  } catch (const std::exception &) {
    throw InputError("pose file line " + std::to_string(line_no) + ": malformed coordinate");
  }
}

std::vector<PoseRecord> read_pdb_poses(std::istream &in) {
  std::vector<PoseRecord> poses;
  bool in_model = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("MODEL", 0) == 0) {
      PoseRecord p;
      p.label = trim(line.substr(5));
      poses.push_back(std::move(p));
      in_model = true;
    } else if (line.rfind("ENDMDL", 0) == 0) {
      in_model = false;
    } else if (line.rfind("ATOM", 0) == 0 || line.rfind("HETATM", 0) == 0) {
      if (line.size() < 54)
        throw InputError("pose file line " + std::to_string(line_no) + ": truncated record");
      if (trim(line.substr(12, 4)) != "CA")
        continue;
      if (!in_model) {
        if (!poses.empty() && !poses.back().label.empty())
          throw InputError("pose file line " + std::to_string(line_no) + ": atom outside MODEL");
        if (poses.empty())
          poses.emplace_back();
      }
      poses.back().positions.push_back({coordinate(line, 30, line_no),
                                        coordinate(line, 38, line_no),
                                        coordinate(line, 46, line_no)});
    }
  }
  return poses;
}

std::vector<PoseRecord> read_plain_poses(std::istream &in) {
  std::vector<PoseRecord> poses;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    if (t.rfind("POSE", 0) == 0) {
      PoseRecord p;
      p.label = trim(t.substr(4));
      poses.push_back(std::move(p));
      continue;
    }
    if (poses.empty())
      throw InputError("pose file line " + std::to_string(line_no) + ": coordinates before POSE");
    std::istringstream fields(t);
    Vec3 v;
    std::string extra;
    if (!(fields >> v.x >> v.y >> v.z) || (fields >> extra))
      throw InputError("pose file line " + std::to_string(line_no) + ": expected x y z");
    poses.back().positions.push_back(v);
  }
  return poses;
}

} // namespace

std::vector<PoseRecord> read_poses(std::istream &in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream probe(text);
  std::string line;
  bool plain = false;
  while (std::getline(probe, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    plain = t.rfind("POSE", 0) == 0;
    break;
  }
  std::istringstream body(text);
  auto poses = plain ? read_plain_poses(body) : read_pdb_poses(body);
  if (poses.empty())
    throw InputError("no poses found");
  for (std::size_t i = 0; i < poses.size(); ++i) {
    poses[i].rank = static_cast<int>(i) + 1;
    if (poses[i].positions.empty())
      throw InputError("pose " + std::to_string(i + 1) + " has no C-alpha atoms");
  }
  return poses;
}

std::vector<PoseRecord> read_poses(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open pose file: " + path.string());
  return read_poses(in);
}

ContactSet pose_contacts(const PoseRecord &pose, const ProteinStructure &protein, double cutoff) {
  if (pose.positions.empty())
    throw InputError("pose has no residues");
  ContactSet out;
  for (std::size_t m = 0; m < pose.positions.size(); ++m)
    for (std::size_t r = 0; r < protein.residues.size(); ++r)
      if (distance(pose.positions[m], protein.residues[r].ca) <= cutoff)
        out.pairs.insert({static_cast<int>(m), static_cast<int>(r)});
  return out;
}

ContactSet native_contacts(const PoseRecord &reference, const ProteinStructure &protein,
                           double cutoff) {
  return pose_contacts(reference, protein, cutoff);
}

double f_nat(const ContactSet &contacts, const ContactSet &native) {
  if (native.empty())
    throw DomainError("native contact set is empty");
  std::size_t shared = 0;
  for (const auto &p : contacts.pairs)
    shared += native.pairs.count(p);
  return static_cast<double>(shared) / static_cast<double>(native.size());
}

double f_nat(const PoseRecord &pose, const ContactSet &native, const ProteinStructure &protein,
             double cutoff) {
  return f_nat(pose_contacts(pose, protein, cutoff), native);
}

PrCurve pr_curve(const std::vector<bool> &labels) {
  if (labels.empty())
    throw InputError("precision-recall needs at least one pose");
  PrCurve c;
  c.labels = labels;
  c.positives = static_cast<int>(std::count(labels.begin(), labels.end(), true));
  if (c.positives == 0) {
    c.no_positives = true;
    for (std::size_t k = 0; k < labels.size(); ++k)
      c.points.emplace_back(0.0, 0.0);
    return c;
  }
  // Recall grows by exactly 1/P at each positive; using that step rather
  // than a difference of recalls keeps the sum free of cancellation.
  const double step = 1.0 / c.positives;
  int tp = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    tp += labels[k] ? 1 : 0;
    double recall = static_cast<double>(tp) / c.positives;
    double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    if (labels[k])
      c.auc += step * precision;
    c.points.emplace_back(recall, precision);
  }
  return c;
}

PrCurve pr_auc(const std::vector<PoseRecord> &poses, const ContactSet &native,
               const ProteinStructure &protein, double threshold, double cutoff) {
  if (poses.empty())
    throw InputError("precision-recall needs at least one pose");
  std::vector<const PoseRecord *> ranked;
  for (const auto &p : poses)
    ranked.push_back(&p);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const PoseRecord *a, const PoseRecord *b) { return a->rank < b->rank; });
  std::vector<bool> labels;
  for (const auto *p : ranked)
    labels.push_back(f_nat(*p, native, protein, cutoff) > threshold);
  return pr_curve(labels);
}

FrequencyTable family_histogram(const std::vector<std::string> &sequences,
                                const std::array<int, kNumResidues> &assignment,
                                int num_families, int positions) {
  if (positions < 1)
    throw DomainError("histogram needs at least one position");
  if (sequences.empty())
    throw InputError("histogram needs at least one sequence");
  FrequencyTable t;
  t.num_families = num_families;
  t.rows.assign(static_cast<std::size_t>(positions),
                std::vector<double>(static_cast<std::size_t>(num_families), 0.0));
  for (const auto &s : sequences) {
    if (static_cast<int>(s.size()) != positions)
      throw InputError("sequence '" + s + "' has length " + std::to_string(s.size()) +
                       ", expected " + std::to_string(positions));
    for (int p = 0; p < positions; ++p) {
      int family = assignment[static_cast<std::size_t>(AminoAcid::from_code(s[p]).index())];
      t.rows[static_cast<std::size_t>(p)][static_cast<std::size_t>(family)] += 1.0;
    }
  }
  const double n = static_cast<double>(sequences.size());
  for (auto &row : t.rows)
    for (auto &v : row)
      v /= n;
  return t;
}

FrequencyTable family_histogram(const std::vector<std::string> &sequences,
                                const ClusteringResult &clustering, int positions) {
  return family_histogram(sequences, clustering.assignment, clustering.num_families, positions);
}

std::vector<int> ranked_families(const std::vector<double> &row) {
  std::vector<int> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(b)];
  });
  return order;
}

Top2Result top2_containment(const FrequencyTable &designed, const FrequencyTable &reference) {
  if (designed.num_families != reference.num_families ||
      designed.positions() != reference.positions())
    throw InputError("frequency tables differ in shape");
  Top2Result r;
  for (int p = 0; p < designed.positions(); ++p) {
    auto ref = ranked_families(reference.rows[static_cast<std::size_t>(p)]);
    auto des = ranked_families(designed.rows[static_cast<std::size_t>(p)]);
    bool ok = !ref.empty() && (des[0] == ref[0] || (des.size() > 1 && des[1] == ref[0]));
    r.pass.push_back(ok);
    r.count += ok ? 1 : 0;
  }
  return r;
}

MevSpectrum mev_spectrum(const std::vector<double> &energies,
                         const std::vector<std::string> &sequences, int bins) {
  if (energies.empty())
    throw InputError("spectrum needs at least one result");
  if (bins < 1)
    throw DomainError("spectrum needs at least one bin");
  if (!sequences.empty() && sequences.size() != energies.size())
    throw InputError("one sequence per result expected");
  MevSpectrum s;
  s.samples = static_cast<int>(energies.size());
  auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  s.min = *lo;
  s.mean = std::accumulate(energies.begin(), energies.end(), 0.0) / s.samples;
  const double max = *hi;
  if (max == s.min) {
    s.edges = {s.min, max};
    s.counts = {s.samples};
  } else {
    const double width = (max - s.min) / bins;
    for (int b = 0; b <= bins; ++b)
      s.edges.push_back(b == bins ? max : s.min + b * width);
    s.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double e : energies) {
      int b = static_cast<int>(std::floor((e - s.min) / width));
      ++s.counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
    }
  }
  std::set<std::string> distinct;
  for (const auto &q : sequences)
    if (!q.empty())
      distinct.insert(q);
  s.distinct_sequences = static_cast<int>(distinct.size());
  return s;
}

void write_pr_csv(std::ostream &out, const PrCurve &curve) {
  out << "rank,positive,recall,precision\n";
  for (std::size_t k = 0; k < curve.points.size(); ++k)
    out << k + 1 << ',' << (curve.labels[k] ? 1 : 0) << ',' << curve.points[k].first << ','
        << curve.points[k].second << '\n';
}

void write_histogram_csv(std::ostream &out, const FrequencyTable &table) {
  out << "position";
  for (int f = 0; f < table.num_families; ++f)
    out << ",family_" << f;
  out << '\n';
  for (int p = 0; p < table.positions(); ++p) {
    out << p + 1;
    for (double v : table.rows[static_cast<std::size_t>(p)])
      out << ',' << v;
    out << '\n';
  }
}

void write_spectrum_csv(std::ostream &out, const MevSpectrum &spectrum) {
  out << "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < spectrum.counts.size(); ++b)
    out << spectrum.edges[b] << ',' << spectrum.edges[b + 1] << ',' << spectrum.counts[b] << '\n';
}

void write_comparison_tsv(std::ostream &out, const FrequencyTable &designed,
                          const FrequencyTable &reference, const Top2Result &top2) {
  out << "position\treference_top\tdesigned_top1\tdesigned_top2\tcontained\n";
  for (int p = 0; p < designed.positions(); ++p) {
    auto ref = ranked_families(reference.rows[static_cast<std::size_t>(p)]);
    auto des = ranked_families(designed.rows[static_cast<std::size_t>(p)]);
    out << p + 1 << '\t' << ref[0] << '\t' << des[0] << '\t' << (des.size() > 1 ? des[1] : -1)
        << '\t' << (top2.pass[static_cast<std::size_t>(p)] ? "yes" : "no") << '\n';
  }
  out << "total\t\t\t\t" << top2.count << '/' << designed.positions() << '\n';
}

} // namespace pepqubo
