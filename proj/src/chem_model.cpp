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

#include "pepqubo/chem_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#ifndef PEPQUBO_DATA_DIR_DEFAULT
#define PEPQUBO_DATA_DIR_DEFAULT "data"
#endif

namespace pepqubo {

namespace {

constexpr std::array<std::string_view, kNumResidues> kThreeLetter = {
    "ALA", "CYS", "ASP", "GLU", "PHE", "GLY", "HIS", "ILE", "LYS", "LEU",
    "MET", "ASN", "PRO", "GLN", "ARG", "SER", "THR", "VAL", "TRP", "TYR"};

struct Alias {
  std::string_view name;
  char code;
};

constexpr std::array<Alias, 8> kAliases = {{{"HID", 'H'},
                                            {"HIE", 'H'},
                                            {"HIP", 'H'},
                                            {"HSD", 'H'},
                                            {"HSE", 'H'},
                                            {"HSP", 'H'},
                                            {"CYX", 'C'},
                                            {"CYM", 'C'}}};

// Non-empty, non-comment lines split into whitespace tokens.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open table file: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;)
      tokens.push_back(tok);
    if (!tokens.empty())
      rows.push_back(std::move(tokens));
  }
  return rows;
}

double parse_number(const std::string &tok, const std::filesystem::path &path) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size())
      throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw InputError(path.string() + ": not a number: '" + tok + "'");
  }
}

int code_index(const std::string &tok, const std::filesystem::path &path) {
  if (tok.size() != 1)
    throw InputError(path.string() + ": expected a one-letter residue code, got '" + tok + "'");
  return AminoAcid::from_code(tok[0]).index();
}

SquareMatrix load_energies(const std::filesystem::path &path) {
  auto rows = read_table(path);
  if (rows.empty())
    throw InputError(path.string() + ": empty energy table");
  const auto &header = rows.front();
  if (header.size() != kNumResidues)
    throw InputError(path.string() + ": header must list 20 residue codes");
  std::array<int, kNumResidues> column{};
  std::array<bool, kNumResidues> seen{};
  for (std::size_t c = 0; c < header.size(); ++c) {
    int idx = code_index(header[c], path);
    if (seen[static_cast<std::size_t>(idx)])
      throw InputError(path.string() + ": duplicate residue in header: " + header[c]);
    seen[static_cast<std::size_t>(idx)] = true;
    column[c] = idx;
  }
  if (rows.size() - 1 < kNumResidues)
    throw InputError(path.string() + ": missing residue row (found " +
                     std::to_string(rows.size() - 1) + " of 20)");
  if (rows.size() - 1 > kNumResidues)
    throw InputError(path.string() + ": more than 20 energy rows");

  SquareMatrix e(kNumResidues);
  std::array<bool, kNumResidues> row_seen{};
  for (std::size_t r = 0; r < kNumResidues; ++r) {
    const auto &tokens = rows[r + 1];
    std::size_t first = 0;
    int row_idx = column[r];
    if (tokens.size() == kNumResidues + 1) {
      row_idx = code_index(tokens[0], path);
      first = 1;
    } else if (tokens.size() != kNumResidues) {
      throw InputError(path.string() + ": energy row " + std::to_string(r + 1) +
                       " does not have 20 values");
    }
    if (row_seen[static_cast<std::size_t>(row_idx)])
      throw InputError(path.string() + ": duplicate energy row");
    row_seen[static_cast<std::size_t>(row_idx)] = true;
    for (std::size_t c = 0; c < kNumResidues; ++c)
      e(static_cast<std::size_t>(row_idx), static_cast<std::size_t>(column[c])) =
          parse_number(tokens[first + c], path);
  }
  return e;
}

ResidueVector load_vector(const std::filesystem::path &path) {
  auto rows = read_table(path);
  ResidueVector values{};
  std::array<bool, kNumResidues> seen{};
  for (const auto &tokens : rows) {
    if (tokens.size() != 2)
      throw InputError(path.string() + ": expected 'code value' lines");
    int idx = code_index(tokens[0], path);
    if (seen[static_cast<std::size_t>(idx)])
      throw InputError(path.string() + ": duplicate residue " + tokens[0]);
    seen[static_cast<std::size_t>(idx)] = true;
    values[static_cast<std::size_t>(idx)] = parse_number(tokens[1], path);
  }
  for (int i = 0; i < kNumResidues; ++i)
    if (!seen[static_cast<std::size_t>(i)])
      throw InputError(path.string() + ": missing residue row for " +
                       std::string(1, kResidueCodes[static_cast<std::size_t>(i)]));
  return values;
}

// Cluster-mean loss: sum e^2 - sum_IJ S_IJ^2 / (n_I n_J).
double assignment_loss(const SquareMatrix &e, const std::array<int, kNumResidues> &a, int d,
                       std::vector<double> &sums, std::vector<int> &counts) {
  sums.assign(static_cast<std::size_t>(d * d), 0.0);
  counts.assign(static_cast<std::size_t>(d), 0);
  double sq = 0.0;
  for (int k = 0; k < kNumResidues; ++k) {
    ++counts[static_cast<std::size_t>(a[static_cast<std::size_t>(k)])];
    for (int l = 0; l < kNumResidues; ++l) {
      double v = e(static_cast<std::size_t>(k), static_cast<std::size_t>(l));
      sums[static_cast<std::size_t>(a[static_cast<std::size_t>(k)] * d +
                                    a[static_cast<std::size_t>(l)])] += v;
      sq += v * v;
    }
  }
  double explained = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double n = static_cast<double>(counts[static_cast<std::size_t>(i)]) *
                 counts[static_cast<std::size_t>(j)];
      if (n > 0)
        explained += sums[static_cast<std::size_t>(i * d + j)] *
                     sums[static_cast<std::size_t>(i * d + j)] / n;
    }
  return std::max(0.0, sq - explained);
}

using Assignment = std::array<int, kNumResidues>;

// Single-residue reassignment descent, keeping every family non-empty.
double descend(const SquareMatrix &e, Assignment &a, int d, std::mt19937_64 &rng) {
  std::vector<double> sums;
  std::vector<int> counts;
  double current = assignment_loss(e, a, d, sums, counts);
  std::array<int, kNumResidues> order{};
  std::iota(order.begin(), order.end(), 0);
  bool improved = true;
  while (improved) {
    improved = false;
    std::shuffle(order.begin(), order.end(), rng);
    for (int r : order) {
      auto ur = static_cast<std::size_t>(r);
      int from = a[ur];
      int size_from = static_cast<int>(std::count(a.begin(), a.end(), from));
      if (size_from == 1)
        continue;
      int best_family = from;
      double best = current;
      for (int to = 0; to < d; ++to) {
        if (to == from)
          continue;
        a[ur] = to;
        double candidate = assignment_loss(e, a, d, sums, counts);
        if (candidate < best - 1e-12) {
          best = candidate;
          best_family = to;
        }
      }
      a[ur] = best_family;
      if (best_family != from) {
        current = best;
        improved = true;
      }
    }
  }
  return current;
}

Assignment random_surjective(int d, std::mt19937_64 &rng) {
  Assignment a{};
  std::array<int, kNumResidues> perm{};
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_int_distribution<int> pick(0, d - 1);
  for (int i = 0; i < kNumResidues; ++i)
    a[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i < d ? i : pick(rng);
  return a;
}

void check_family_count(int d) {
  if (d < 1 || d > kNumResidues)
    throw DomainError("alphabet size must be in 1..20, got " + std::to_string(d));
}

} // namespace

AminoAcid AminoAcid::from_code(char code) {
  auto pos = kResidueCodes.find(code);
  if (pos == std::string_view::npos)
    throw InputError(std::string("unknown residue code '") + code + "'");
  return AminoAcid(static_cast<int>(pos));
}

AminoAcid AminoAcid::from_three_letter(std::string_view name) {
  for (std::size_t i = 0; i < kThreeLetter.size(); ++i)
    if (kThreeLetter[i] == name)
      return AminoAcid(static_cast<int>(i));
  for (const auto &alias : kAliases)
    if (alias.name == name)
      return from_code(alias.code);
  throw InputError("unknown residue name '" + std::string(name) + "'");
}

std::string AminoAcid::three_letter() const {
  return std::string(kThreeLetter[static_cast<std::size_t>(index_)]);
}

void validate_raw_tables(const RawTables &raw) {
  if (raw.e.size() != kNumResidues)
    throw InputError("energy matrix must be 20x20");
  for (std::size_t i = 0; i < kNumResidues; ++i)
    for (std::size_t j = i + 1; j < kNumResidues; ++j)
      if (std::abs(raw.e(i, j) - raw.e(j, i)) > 1e-9)
        throw InputError(std::string("energy matrix is not symmetric at (") + kResidueCodes[i] +
                         "," + kResidueCodes[j] + ")");
  for (std::size_t i = 0; i < kNumResidues; ++i) {
    if (!(raw.sigma[i] > 0.0))
      throw InputError(std::string("non-positive vdW diameter for ") + kResidueCodes[i]);
    if (!(raw.f_surface[i] >= 0.0))
      throw InputError(std::string("negative surface frequency for ") + kResidueCodes[i]);
  }
  double total = std::accumulate(raw.f_surface.begin(), raw.f_surface.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9)
    throw InputError("surface frequencies are not normalized (sum = " + std::to_string(total) +
                     ")");
}

RawTables load_raw_tables(const std::filesystem::path &energies,
                          const std::filesystem::path &diameters,
                          const std::filesystem::path &frequencies) {
  RawTables raw;
  raw.e = load_energies(energies);
  raw.sigma = load_vector(diameters);
  raw.f_surface = load_vector(frequencies);
  validate_raw_tables(raw);
  return raw;
}

RawTables load_raw_tables(const std::filesystem::path &dir) {
  return load_raw_tables(dir / "mj_contact_energies.txt", dir / "vdw_diameters.txt",
                         dir / "surface_frequencies.txt");
}

std::filesystem::path default_data_dir() {
  if (const char *env = std::getenv("PEPQUBO_DATA_DIR"); env && *env)
    return env;
  return PEPQUBO_DATA_DIR_DEFAULT;
}

SquareMatrix transform_epsilon(const SquareMatrix &e, double lambda, double e0) {
  if (!(lambda > 0.0))
    throw DomainError("lambda must be positive");
  SquareMatrix eps(e.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j)
      eps(i, j) = lambda * (e(i, j) - e0);
  return eps;
}

double lj_potential(double epsilon, double sigma, double r, double cutoff) {
  if (!(r > 0.0))
    throw DomainError("pair distance must be positive");
  if (r > cutoff)
    return 0.0;
  double s6 = std::pow(sigma / r, 6);
  double core = s6 * s6 - s6;
  if (epsilon < 0.0)
    return 4.0 * -epsilon * core;
  if (epsilon > 0.0) {
    double r0 = std::pow(2.0, 1.0 / 6.0) * sigma;
    if (r < r0)
      return 4.0 * epsilon * core + 2.0 * epsilon;
    return -4.0 * epsilon * core;
  }
  return 0.0;
}

ClusteringResult evaluate_assignment(const RawTables &raw, const Assignment &assignment,
                                     int num_families) {
  check_family_count(num_families);
  const auto d = static_cast<std::size_t>(num_families);
  std::vector<double> sums;
  std::vector<int> counts;
  for (int f : assignment)
    if (f < 0 || f >= num_families)
      throw DomainError("family index out of range in assignment");

  ClusteringResult out;
  out.num_families = num_families;
  out.assignment = assignment;
  out.loss = assignment_loss(raw.e, assignment, num_families, sums, counts);
  for (std::size_t k = 0; k < d; ++k)
    if (counts[k] == 0)
      throw DomainError("assignment leaves family " + std::to_string(k) + " empty");
  out.e_clustered = SquareMatrix(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      out.e_clustered(i, j) = sums[i * d + j] / (static_cast<double>(counts[i]) * counts[j]);
      out.e_clustered(j, i) = out.e_clustered(i, j);
    }
  // Direct residual sum; avoids the cancellation of the fast form.
  out.loss = 0.0;
  for (std::size_t k = 0; k < kNumResidues; ++k)
    for (std::size_t l = 0; l < kNumResidues; ++l) {
      double r = raw.e(k, l) - out.e_clustered(static_cast<std::size_t>(assignment[k]),
                                               static_cast<std::size_t>(assignment[l]));
      out.loss += r * r;
    }
  out.sigma_clustered.assign(d, 0.0);
  for (std::size_t k = 0; k < kNumResidues; ++k)
    out.sigma_clustered[static_cast<std::size_t>(assignment[k])] += raw.sigma[k];
  for (std::size_t i = 0; i < d; ++i)
    out.sigma_clustered[i] /= counts[i];
  return out;
}

ClusteringResult cluster_exhaustive_bipartition(const RawTables &raw) {
  // The last residue is pinned to family 0 to remove the label symmetry.
  std::vector<double> sums;
  std::vector<int> counts;
  Assignment a{};
  Assignment best_a{};
  double best = std::numeric_limits<double>::infinity();
  const std::uint32_t limit = 1u << (kNumResidues - 1);
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    for (std::size_t i = 0; i + 1 < kNumResidues; ++i)
      a[i] = static_cast<int>((mask >> i) & 1u);
    a[kNumResidues - 1] = 0;
    double loss = assignment_loss(raw.e, a, 2, sums, counts);
    if (loss < best) {
      best = loss;
      best_a = a;
    }
  }
  return evaluate_assignment(raw, canonical_partition(best_a), 2);
}

ClusteringResult cluster_local_search(const RawTables &raw, int num_families,
                                      const ClusteringOptions &options) {
  check_family_count(num_families);
  std::mt19937_64 rng(options.seed);
  Assignment best_a{};
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Assignment a = random_surjective(num_families, rng);
    double loss = descend(raw.e, a, num_families, rng);
    if (loss < best - 1e-12) {
      best = loss;
      best_a = a;
    }
  }
  return evaluate_assignment(raw, canonical_partition(best_a), num_families);
}

ClusteringResult cluster_alphabet(const RawTables &raw, int num_families, std::uint64_t seed) {
  ClusteringOptions options;
  options.seed = seed;
  return cluster_alphabet(raw, num_families, options);
}

ClusteringResult cluster_alphabet(const RawTables &raw, int num_families,
                                  const ClusteringOptions &options) {
  check_family_count(num_families);
  if (num_families == 1)
    return evaluate_assignment(raw, Assignment{}, 1);
  if (num_families == kNumResidues) {
    Assignment identity{};
    std::iota(identity.begin(), identity.end(), 0);
    return evaluate_assignment(raw, identity, kNumResidues);
  }

  // Grow from the exact D=2 solution; at each size the best single-residue
  // split of the previous optimum competes with random restarts, so the
  // best-found loss never increases with D.
  ClusteringResult best = cluster_exhaustive_bipartition(raw);
  std::mt19937_64 rng(options.seed);
  for (int d = 3; d <= num_families; ++d) {
    ClusteringOptions level = options;
    level.seed = rng();
    ClusteringResult candidate = cluster_local_search(raw, d, level);

    std::vector<double> sums;
    std::vector<int> counts;
    Assignment split_best{};
    double split_loss = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < kNumResidues; ++r) {
      Assignment a = best.assignment;
      if (std::count(a.begin(), a.end(), a[r]) == 1)
        continue;
      a[r] = d - 1;
      double loss = assignment_loss(raw.e, a, d, sums, counts);
      if (loss < split_loss) {
        split_loss = loss;
        split_best = a;
      }
    }
    descend(raw.e, split_best, d, rng);
    ClusteringResult split = evaluate_assignment(raw, canonical_partition(split_best), d);
    best = split.loss <= candidate.loss ? split : candidate;
  }
  return best;
}

std::array<int, kNumResidues> canonical_partition(const std::array<int, kNumResidues> &a) {
  std::array<int, kNumResidues> relabel{};
  relabel.fill(-1);
  std::array<int, kNumResidues> out{};
  int next = 0;
  for (std::size_t i = 0; i < kNumResidues; ++i) {
    auto f = static_cast<std::size_t>(a[i]);
    if (relabel[f] < 0)
      relabel[f] = next++;
    out[i] = relabel[f];
  }
  return out;
}

double InteractionModel::lj_energy(int i, int j, double r) const {
  return lj_potential(epsilon(static_cast<std::size_t>(i), static_cast<std::size_t>(j)),
                      sigma_pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), r,
                      cutoff);
}

InteractionModel reduce_model(const RawTables &raw, const ClusteringResult &clustering,
                              double cutoff, double lambda, double e0) {
  const auto d = static_cast<std::size_t>(clustering.num_families);
  if (clustering.e_clustered.size() != d || clustering.sigma_clustered.size() != d)
    throw InputError("clustering tables do not match the family count");
  InteractionModel model;
  model.num_families = clustering.num_families;
  model.epsilon = transform_epsilon(clustering.e_clustered, lambda, e0);
  model.sigma_family = clustering.sigma_clustered;
  model.sigma_pair = SquareMatrix(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      model.sigma_pair(i, j) = 0.5 * (model.sigma_family[i] + model.sigma_family[j]);
  model.family_frequency.assign(d, 0.0);
  for (std::size_t k = 0; k < kNumResidues; ++k)
    model.family_frequency[static_cast<std::size_t>(clustering.assignment[k])] +=
        raw.f_surface[k];
  model.cutoff = cutoff;
  model.lambda = lambda;
  model.e0 = e0;
  model.cluster_map = clustering.assignment;
  return model;
}

InteractionModel full_model(const RawTables &raw, double cutoff, double lambda, double e0) {
  return reduce_model(raw, cluster_alphabet(raw, kNumResidues), cutoff, lambda, e0);
}

char family_symbol(int family) {
  static constexpr std::string_view symbols = "0123456789abcdefghij";
  if (family < 0 || family >= static_cast<int>(symbols.size()))
    throw DomainError("family index out of range");
  return symbols[static_cast<std::size_t>(family)];
}

} // namespace pepqubo
