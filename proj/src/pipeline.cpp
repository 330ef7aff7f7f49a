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

#include "pepqubo/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "pepqubo/interchange.hpp"

using nlohmann::json;

namespace pepqubo {

namespace {

json vec_to_json(const Vec3 &v) { return {v.x, v.y, v.z}; }

Vec3 vec_from_json(const json &j) {
  auto a = j.get<std::array<double, 3>>();
  return {a[0], a[1], a[2]};
}

template <class T> json opt_to_json(const std::optional<T> &v) {
  return v ? json(*v) : json(nullptr);
}

template <class T> std::optional<T> opt_from_json(const json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null())
    return std::nullopt;
  return j.at(key).get<T>();
}

std::string format_energy(double e) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", e);
  return buf;
}

std::ofstream open_output(const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write " + path.string());
  return out;
}

bool record_less(const RunRecord &a, const RunRecord &b) {
  if (a.result.energy != b.result.energy)
    return a.result.energy < b.result.energy;
  return a.result.bits < b.result.bits;
}

} // namespace

std::string bits_to_string(const Bits &bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i])
      s[i] = '1';
  return s;
}

Bits bits_from_string(const std::string &s) {
  Bits b(s.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1')
      throw InputError("bit string may only contain 0 and 1");
    b[i] = s[i] == '1';
  }
  return b;
}

// ---- configuration ----------------------------------------------------------

std::filesystem::path RunConfig::resolve(const std::string &p) const {
  std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty())
    return path;
  return base_dir / path;
}

void RunConfig::validate() const {
  if (structure.empty())
    throw InputError("config: structure is required");
  if (!std::filesystem::exists(resolve(structure)))
    throw InputError("config: structure file not found: " + resolve(structure).string());
  if (!reference_peptide.empty() && !std::filesystem::exists(resolve(reference_peptide)))
    throw InputError("config: reference peptide not found: " +
                     resolve(reference_peptide).string());
  if (reference_peptide.empty() && seeds.empty())
    throw InputError("config: either reference_peptide or seeds must be given");
  if (reference_peptide.empty() && !endpoints && seeds.size() < 2)
    throw InputError("config: endpoints need two seeds or an explicit endpoints entry");
  if (!data_dir.empty() && !std::filesystem::is_directory(resolve(data_dir)))
    throw InputError("config: data directory not found: " + resolve(data_dir).string());
  if (families < 1 || families > kNumResidues)
    throw InputError("config: families must be in 1..20");
  if (L0 < 1)
    throw InputError("config: L0 must be at least 1");
  if (p < 0.0 || p >= 1.0)
    throw InputError("config: p must be in [0, 1)");
  if (restarts < 1 || stage2_restarts < 1 || sweeps < 1 || stage2_sweeps < 1)
    throw InputError("config: restarts and sweeps must be positive");
  if (designs < 1)
    throw InputError("config: designs must be positive");
  if (spectrum_bins < 1)
    throw InputError("config: spectrum_bins must be positive");
  if (contacts && *contacts < 0.0)
    throw InputError("config: contacts must be non-negative");
  (void)solver_from_string(solver);
}

bool RunConfig::operator==(const RunConfig &o) const { return to_json(*this) == to_json(o); }

json to_json(const RunConfig &c) {
  json seeds = json::array();
  for (const auto &s : c.seeds)
    seeds.push_back(vec_to_json(s));
  json endpoints = nullptr;
  if (c.endpoints)
    endpoints = {vec_to_json((*c.endpoints)[0]), vec_to_json((*c.endpoints)[1])};
  return {{"structure", c.structure},
          {"chains", c.chains},
          {"reference_peptide", c.reference_peptide},
          {"seeds", seeds},
          {"endpoints", endpoints},
          {"data_dir", c.data_dir},
          {"spacing", c.spacing},
          {"radius", c.radius},
          {"cutoff", c.cutoff},
          {"clash_factor", c.clash_factor},
          {"lambda", c.lambda},
          {"e0", c.e0},
          {"families", c.families},
          {"clustering_restarts", c.clustering_restarts},
          {"clustering_seed", c.clustering_seed},
          {"L0", c.L0},
          {"p", c.p},
          {"A", opt_to_json(c.A)},
          {"w", opt_to_json(c.w)},
          {"stage2_A", opt_to_json(c.stage2_A)},
          {"literal_endpoint_signs", c.literal_endpoint_signs},
          {"contacts", opt_to_json(c.contacts)},
          {"contact_tolerance", c.contact_tolerance},
          {"contact_max_iterations", c.contact_max_iterations},
          {"solver", c.solver},
          {"restarts", c.restarts},
          {"sweeps", c.sweeps},
          {"stage2_restarts", c.stage2_restarts},
          {"stage2_sweeps", c.stage2_sweeps},
          {"seed", c.seed},
          {"threads", c.threads},
          {"designs", c.designs},
          {"spectrum_bins", c.spectrum_bins},
          {"scan_endpoints", c.scan_endpoints},
          {"scan_limit", c.scan_limit},
          {"output_dir", c.output_dir}};
}

RunConfig config_from_json(const json &j) {
  if (!j.is_object())
    throw InputError("config must be a JSON object");
  const json known = to_json(RunConfig{});
  for (const auto &[key, value] : j.items())
    if (!known.contains(key))
      throw InputError("config: unknown key '" + key + "'");
  try {
    RunConfig c;
    c.structure = j.value("structure", c.structure);
    c.chains = j.value("chains", c.chains);
    c.reference_peptide = j.value("reference_peptide", c.reference_peptide);
    if (j.contains("seeds"))
      for (const auto &s : j.at("seeds"))
        c.seeds.push_back(vec_from_json(s));
    if (j.contains("endpoints") && !j.at("endpoints").is_null()) {
      const auto &e = j.at("endpoints");
      if (e.size() != 2)
        throw InputError("config: endpoints must hold two points");
      c.endpoints = std::array<Vec3, 2>{vec_from_json(e.at(0)), vec_from_json(e.at(1))};
    }
    c.data_dir = j.value("data_dir", c.data_dir);
    c.spacing = j.value("spacing", c.spacing);
    c.radius = j.value("radius", c.radius);
    c.cutoff = j.value("cutoff", c.cutoff);
    c.clash_factor = j.value("clash_factor", c.clash_factor);
    c.lambda = j.value("lambda", c.lambda);
    c.e0 = j.value("e0", c.e0);
    c.families = j.value("families", c.families);
    c.clustering_restarts = j.value("clustering_restarts", c.clustering_restarts);
    c.clustering_seed = j.value("clustering_seed", c.clustering_seed);
    c.L0 = j.value("L0", c.L0);
    c.p = j.value("p", c.p);
    c.A = opt_from_json<double>(j, "A");
    c.w = opt_from_json<double>(j, "w");
    c.stage2_A = opt_from_json<double>(j, "stage2_A");
    c.literal_endpoint_signs = j.value("literal_endpoint_signs", c.literal_endpoint_signs);
    c.contacts = opt_from_json<double>(j, "contacts");
    c.contact_tolerance = j.value("contact_tolerance", c.contact_tolerance);
    c.contact_max_iterations = j.value("contact_max_iterations", c.contact_max_iterations);
    c.solver = j.value("solver", c.solver);
    c.restarts = j.value("restarts", c.restarts);
    c.sweeps = j.value("sweeps", c.sweeps);
    c.stage2_restarts = j.value("stage2_restarts", c.stage2_restarts);
    c.stage2_sweeps = j.value("stage2_sweeps", c.stage2_sweeps);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.designs = j.value("designs", c.designs);
    c.spectrum_bins = j.value("spectrum_bins", c.spectrum_bins);
    c.scan_endpoints = j.value("scan_endpoints", c.scan_endpoints);
    c.scan_limit = j.value("scan_limit", c.scan_limit);
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
  } catch (const json::exception &ex) {
    throw InputError(std::string("config: ") + ex.what());
  }
}

RunConfig load_config(const std::filesystem::path &path) {
  RunConfig c = config_from_json(read_json(path));
  c.base_dir = path.parent_path();
  return c;
}

// ---- archive ----------------------------------------------------------------

namespace {

json result_to_json(const SolveResult &r) {
  return {{"bits", bits_to_string(r.bits)},
          {"energy", r.energy},
          {"solver", r.solver},
          {"restart_id", r.restart_id},
          {"seed", r.seed}};
}

SolveResult result_from_json(const json &j) {
  SolveResult r;
  r.bits = bits_from_string(j.at("bits").get<std::string>());
  r.energy = j.at("energy").get<double>();
  r.solver = j.at("solver").get<std::string>();
  r.restart_id = j.at("restart_id").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

json record_to_json(const RunRecord &r) {
  json j = result_to_json(r.result);
  j["feasible"] = r.feasible;
  j["sequence"] = r.sequence;
  j["path"] = r.path;
  j["violations"] = r.violations;
  return j;
}

RunRecord record_from_json(const json &j) {
  RunRecord r;
  r.result = result_from_json(j);
  r.feasible = j.at("feasible").get<bool>();
  r.sequence = j.at("sequence").get<std::string>();
  r.path = j.at("path").get<std::vector<int>>();
  r.violations = j.at("violations").get<std::vector<std::string>>();
  return r;
}

json design_to_json(const Design &d) {
  return {{"path", d.path},
          {"family_sequence", d.family_sequence},
          {"sequence", d.sequence},
          {"stage1_energy", d.stage1_energy},
          {"stage2_energy", d.stage2_energy},
          {"external", d.energy.external},
          {"internal", d.energy.internal}};
}

Design design_from_json(const json &j) {
  Design d;
  d.path = j.at("path").get<std::vector<int>>();
  d.family_sequence = j.at("family_sequence").get<std::string>();
  d.sequence = j.at("sequence").get<std::string>();
  d.stage1_energy = j.at("stage1_energy").get<double>();
  d.stage2_energy = j.at("stage2_energy").get<double>();
  d.energy.external = j.at("external").get<double>();
  d.energy.internal = j.at("internal").get<double>();
  return d;
}

} // namespace

json results_to_json(const std::vector<SolveResult> &results) {
  json arr = json::array();
  for (const auto &r : results)
    arr.push_back(result_to_json(r));
  return {{"results", arr}};
}

std::vector<SolveResult> results_from_json(const json &j) {
  try {
    std::vector<SolveResult> out;
    for (const auto &r : j.at("results"))
      out.push_back(result_from_json(r));
    return out;
  } catch (const json::exception &ex) {
    throw InputError(std::string("malformed results file: ") + ex.what());
  }
}

json to_json(const RunArchive &a) {
  json runs1 = json::array();
  for (const auto &r : a.stage1_runs)
    runs1.push_back(record_to_json(r));
  json runs2 = json::array();
  for (const auto &r : a.stage2_runs)
    runs2.push_back(record_to_json(r));
  json designs = json::array();
  for (const auto &d : a.designs)
    designs.push_back(design_to_json(d));
  return {{"version", a.version},
          {"config", to_json(a.config)},
          {"clustering",
           {{"num_families", a.clustering.num_families},
            {"assignment", a.clustering.assignment},
            {"loss", a.clustering.loss}}},
          {"contacts", a.contacts},
          {"contact_trace", a.contact_trace},
          {"lattice", to_json(a.lattice)},
          {"field", to_json(a.field)},
          {"stage1", to_json(a.stage1)},
          {"stage1_runs", runs1},
          {"scanned_endpoints", a.scanned_endpoints},
          {"stage2", a.stage2 ? to_json(*a.stage2) : json(nullptr)},
          {"stage2_runs", runs2},
          {"designs", designs}};
}

RunArchive archive_from_json(const json &j) {
  try {
    RunArchive a;
    a.version = j.at("version").get<std::string>();
    a.config = config_from_json(j.at("config"));
    const auto &c = j.at("clustering");
    a.clustering.num_families = c.at("num_families").get<int>();
    a.clustering.assignment = c.at("assignment").get<std::array<int, kNumResidues>>();
    a.clustering.loss = c.at("loss").get<double>();
    a.contacts = j.at("contacts").get<double>();
    a.contact_trace = j.at("contact_trace").get<std::vector<double>>();
    a.lattice = lattice_from_json(j.at("lattice"));
    a.field = field_from_json(j.at("field"));
    a.stage1 = qubo_from_json(j.at("stage1"));
    for (const auto &r : j.at("stage1_runs"))
      a.stage1_runs.push_back(record_from_json(r));
    a.scanned_endpoints = j.at("scanned_endpoints").get<std::vector<std::pair<int, int>>>();
    if (!j.at("stage2").is_null())
      a.stage2 = qubo_from_json(j.at("stage2"));
    for (const auto &r : j.at("stage2_runs"))
      a.stage2_runs.push_back(record_from_json(r));
    for (const auto &d : j.at("designs"))
      a.designs.push_back(design_from_json(d));
    return a;
  } catch (const json::exception &ex) {
    throw InputError(std::string("corrupt archive: ") + ex.what());
  }
}

RunArchive load_archive(const std::filesystem::path &path) {
  return archive_from_json(read_json(path));
}

// ---- pipeline ---------------------------------------------------------------

std::vector<RunRecord> decode_runs(const std::vector<SolveResult> &results,
                                   const QuboProblem &problem, const PocketLattice &lattice) {
  std::vector<RunRecord> out;
  out.reserve(results.size());
  for (const auto &r : results) {
    RunRecord rec;
    rec.result = r;
    auto d = decode_bits(r.bits, problem.registry(), lattice, problem.meta);
    rec.feasible = d.feasible();
    rec.violations = d.report.violations;
    if (d.peptide) {
      rec.sequence = d.peptide->sequence();
      rec.path = d.peptide->path;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::optional<std::size_t> best_feasible(const std::vector<RunRecord> &runs) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (runs[i].feasible && (!best || record_less(runs[i], runs[*best])))
      best = i;
  return best;
}

std::vector<std::pair<int, int>> endpoint_candidates(const PocketLattice &lattice, int L0,
                                                     int limit) {
  std::vector<int> boundary;
  for (int i = 0; i < lattice.size(); ++i)
    if (lattice.neighbors(i).size() < 6)
      boundary.push_back(i);
  std::vector<std::pair<int, int>> out;
  for (std::size_t a = 0; a < boundary.size(); ++a)
    for (std::size_t b = a + 1; b < boundary.size(); ++b) {
      if (static_cast<int>(out.size()) >= limit)
        return out;
      const auto &g = lattice.grid[static_cast<std::size_t>(boundary[a])];
      const auto &h = lattice.grid[static_cast<std::size_t>(boundary[b])];
      int manhattan = std::abs(g[0] - h[0]) + std::abs(g[1] - h[1]) + std::abs(g[2] - h[2]);
      if (manhattan <= L0 && (L0 - manhattan) % 2 == 0)
        out.emplace_back(boundary[a], boundary[b]);
    }
  return out;
}

namespace {

struct Stage1Run {
  ExternalField field;
  QuboProblem problem;
  std::vector<RunRecord> runs;
  std::optional<std::size_t> best;
};

class Designer {
public:
  Designer(const RunConfig &c, const ProteinStructure &protein, const PocketLattice &lattice,
           const InteractionModel &reduced, std::ostream *log)
      : c_(c), protein_(protein), lattice_(lattice), reduced_(reduced), log_(log) {}

  const Stage1Run &run(double contacts, int s, int t) {
    auto key = std::make_tuple(contacts, s, t);
    auto it = cache_.find(key);
    if (it != cache_.end())
      return it->second;
    PocketLattice lattice = lattice_;
    lattice.s = s;
    lattice.t = t;
    Stage1Run r;
    r.field = compute_external_field(lattice, protein_, reduced_, contacts);
    Stage1Params params;
    params.L0 = c_.L0;
    params.p = c_.p;
    params.A = c_.A;
    params.w = c_.w;
    params.literal_endpoint_signs = c_.literal_endpoint_signs;
    r.problem = build_stage1_qubo(lattice, r.field, reduced_, params);
    RestartOptions opt;
    opt.solver = solver_from_string(c_.solver);
    opt.restarts = c_.restarts;
    opt.base_seed = c_.seed;
    opt.sweeps = c_.sweeps;
    opt.threads = c_.threads;
    r.runs = decode_runs(run_restarts(r.problem, opt), r.problem, lattice);
    r.best = best_feasible(r.runs);
    if (log_) {
      auto feasible = std::count_if(r.runs.begin(), r.runs.end(),
                                    [](const RunRecord &x) { return x.feasible; });
      *log_ << "stage 1: Nc=" << contacts << " s=" << s << " t=" << t << " vars="
            << r.problem.num_vars() << " feasible " << feasible << "/" << r.runs.size();
      if (r.best)
        *log_ << " best " << r.runs[*r.best].result.energy;
      *log_ << '\n';
    }
    return cache_.emplace(key, std::move(r)).first->second;
  }

private:
  const RunConfig &c_;
  const ProteinStructure &protein_;
  const PocketLattice &lattice_;
  const InteractionModel &reduced_;
  std::ostream *log_;
  std::map<std::tuple<double, int, int>, Stage1Run> cache_;
};

std::string infeasible_message(const std::vector<RunRecord> &runs) {
  std::string msg = "no feasible stage-1 chain in " + std::to_string(runs.size()) + " runs";
  const RunRecord *best = nullptr;
  for (const auto &r : runs)
    if (!best || record_less(r, *best))
      best = &r;
  if (best) {
    msg += "; best infeasible energy " + format_energy(best->result.energy);
    for (std::size_t i = 0; i < best->violations.size() && i < 5; ++i)
      msg += "; " + best->violations[i];
  }
  return msg;
}

} // namespace

RunArchive cmd_pipeline(const RunConfig &config, std::ostream *log) {
  config.validate();
  RunArchive archive;
  archive.config = config;

  RawTables raw = load_raw_tables(config.data_dir.empty() ? default_data_dir()
                                                          : config.resolve(config.data_dir));
  ProteinStructure protein = parse_structure(config.resolve(config.structure), config.chains);

  std::vector<Vec3> seeds;
  std::array<Vec3, 2> termini{};
  if (!config.reference_peptide.empty()) {
    auto ref = parse_structure(config.resolve(config.reference_peptide));
    for (const auto &r : ref.residues)
      seeds.push_back(r.ca);
    termini = {seeds.front(), seeds.back()};
  }
  seeds.insert(seeds.end(), config.seeds.begin(), config.seeds.end());
  if (config.reference_peptide.empty())
    termini = {config.seeds.front(), config.seeds.back()};
  if (config.endpoints)
    termini = *config.endpoints;

  ClusteringOptions copt;
  copt.restarts = config.clustering_restarts;
  copt.seed = config.clustering_seed;
  archive.clustering = cluster_alphabet(raw, config.families, copt);
  InteractionModel reduced =
      reduce_model(raw, archive.clustering, config.cutoff, config.lambda, config.e0);
  InteractionModel full = full_model(raw, config.cutoff, config.lambda, config.e0);

  LatticeOptions lopt;
  lopt.radius = config.radius;
  lopt.spacing = config.spacing;
  lopt.clash_distance = clash_distance(raw, config.clash_factor);
  PocketLattice lattice = build_lattice(protein, seeds, lopt);
  auto [s, t] = choose_endpoints(lattice, termini[0], termini[1]);
  if (log)
    *log << "lattice: " << lattice.size() << " points, " << lattice.bonds.size()
         << " bonds, s=" << s << " t=" << t << '\n';

  Designer designer(config, protein, lattice, reduced, log);

  if (config.contacts) {
    archive.contacts = *config.contacts;
    archive.contact_trace = {archive.contacts};
  } else {
    auto design = [&](double nc) {
      const Stage1Run &r = designer.run(nc, s, t);
      if (!r.best)
        throw InfeasibleError(infeasible_message(r.runs));
      const RunRecord &best = r.runs[*r.best];
      auto d = decode_bits(best.result.bits, r.problem.registry(), lattice, r.problem.meta);
      PlacedPeptide placed;
      for (int v : d.peptide->path)
        placed.positions.push_back(lattice.points[static_cast<std::size_t>(v)]);
      placed.families = d.peptide->families;
      return placed;
    };
    auto est = estimate_contacts(design, protein, reduced, config.contact_tolerance,
                                 config.contact_max_iterations);
    archive.contacts = est.contacts;
    archive.contact_trace = est.trace;
  }
  if (log)
    *log << "contact number: " << archive.contacts << '\n';

  int best_s = s;
  int best_t = t;
  const Stage1Run *chosen = &designer.run(archive.contacts, s, t);
  if (config.scan_endpoints) {
    archive.scanned_endpoints = endpoint_candidates(lattice, config.L0, config.scan_limit);
    for (auto [a, b] : archive.scanned_endpoints) {
      const Stage1Run &r = designer.run(archive.contacts, a, b);
      if (!r.best)
        continue;
      if (!chosen->best ||
          r.runs[*r.best].result.energy < chosen->runs[*chosen->best].result.energy) {
        chosen = &r;
        best_s = a;
        best_t = b;
      }
    }
  }
  lattice.s = best_s;
  lattice.t = best_t;
  archive.lattice = lattice;
  archive.field = chosen->field;
  archive.stage1 = chosen->problem;
  archive.stage1_runs = chosen->runs;
  if (!chosen->best)
    throw InfeasibleError(infeasible_message(chosen->runs));

  // Distinct feasible stage-1 solutions, best first.
  std::vector<const RunRecord *> ranked;
  for (const auto &r : chosen->runs)
    if (r.feasible)
      ranked.push_back(&r);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RunRecord *a, const RunRecord *b) { return record_less(*a, *b); });
  std::vector<const RunRecord *> picked;
  std::set<std::pair<std::vector<int>, std::string>> seen;
  for (const auto *r : ranked) {
    if (static_cast<int>(picked.size()) >= config.designs)
      break;
    if (seen.insert({r->path, r->sequence}).second)
      picked.push_back(r);
  }

  ExternalField full_field = compute_external_field(lattice, protein, full, archive.contacts);
  for (std::size_t d = 0; d < picked.size(); ++d) {
    const RunRecord &s1 = *picked[d];
    QuboProblem q2 = build_stage2_qubo(lattice, s1.path, full_field, full, config.stage2_A);
    RestartOptions opt;
    opt.solver = config.solver == "exact" && q2.num_vars() <= 24 ? SolverKind::Exact
                                                                  : SolverKind::Anneal;
    opt.restarts = config.stage2_restarts;
    opt.base_seed = restart_seed(config.seed, 1000000 + static_cast<int>(d));
    opt.sweeps = config.stage2_sweeps;
    opt.threads = config.threads;
    std::vector<RunRecord> runs;
    for (auto &r : run_restarts(q2, opt)) {
      RunRecord rec;
      rec.result = std::move(r);
      if (auto labels = decode_positions(rec.result.bits, q2.registry())) {
        rec.feasible = true;
        for (int k : *labels)
          rec.sequence.push_back(AminoAcid(k).code());
        rec.path = s1.path;
      } else {
        rec.violations.push_back("a position does not hold exactly one residue");
      }
      runs.push_back(std::move(rec));
    }
    auto best = best_feasible(runs);
    if (!best)
      throw InfeasibleError("stage 2 found no complete sequence for design " +
                            std::to_string(d + 1));
    Design design;
    design.path = s1.path;
    design.family_sequence = s1.sequence;
    design.sequence = runs[*best].sequence;
    design.stage1_energy = s1.result.energy;
    design.stage2_energy = runs[*best].result.energy;
    DecodedPeptide pep;
    pep.path = s1.path;
    pep.full_alphabet = true;
    pep.length = static_cast<int>(s1.path.size()) - 1;
    for (char c : design.sequence)
      pep.families.push_back(AminoAcid::from_code(c).index());
    design.energy = energy_direct(pep, lattice, full_field, full);
    if (log)
      *log << "design " << d + 1 << ": " << design.sequence << " (" << design.family_sequence
           << ") stage-2 energy " << design.stage2_energy << '\n';
    if (d == 0) {
      archive.stage2 = std::move(q2);
      archive.stage2_runs = std::move(runs);
    }
    archive.designs.push_back(std::move(design));
  }

  // Outputs.
  const auto out_dir = config.resolve(config.output_dir);
  std::filesystem::create_directories(out_dir);
  {
    auto out = open_output(out_dir / "designs.fasta");
    std::vector<std::pair<std::string, std::string>> records;
    for (std::size_t d = 0; d < archive.designs.size(); ++d) {
      const auto &x = archive.designs[d];
      records.emplace_back("design_" + std::to_string(d + 1) + " families=" +
                               x.family_sequence + " energy=" + format_energy(x.stage2_energy),
                           x.sequence);
    }
    write_fasta(out, records);
  }
  {
    auto out = open_output(out_dir / "poses.pdb");
    for (std::size_t d = 0; d < archive.designs.size(); ++d) {
      DecodedPeptide pep;
      pep.path = archive.designs[d].path;
      pep.full_alphabet = true;
      for (char c : archive.designs[d].sequence)
        pep.families.push_back(AminoAcid::from_code(c).index());
      write_ca_model(out, pose_records(pep, lattice), static_cast<int>(d) + 1);
    }
    out << "END\n";
  }
  write_json({{"lattice", to_json(archive.lattice)}, {"field", to_json(archive.field)}},
             out_dir / "lattice.json");
  export_problem(archive.stage1, out_dir / "stage1_qubo.json");
  export_problem(to_ising(archive.stage1), out_dir / "stage1_ising.json");
  if (archive.stage2)
    export_problem(*archive.stage2, out_dir / "stage2_qubo.json");
  write_json(to_json(archive), out_dir / "archive.json");
  std::ostringstream summary;
  cmd_report(archive, summary, out_dir);
  open_output(out_dir / "report.txt") << summary.str();
  if (log)
    *log << summary.str();
  return archive;
}

// ---- report -----------------------------------------------------------------

void cmd_report(const RunArchive &a, std::ostream &out, const std::filesystem::path &out_dir) {
  if (a.stage1_runs.empty())
    throw InputError("archive holds no stage-1 results");
  std::vector<double> energies;
  std::vector<std::string> sequences;
  int feasible = 0;
  for (const auto &r : a.stage1_runs) {
    energies.push_back(r.result.energy);
    sequences.push_back(r.feasible ? r.sequence : std::string());
    feasible += r.feasible ? 1 : 0;
  }
  MevSpectrum spec = mev_spectrum(energies, sequences, a.config.spectrum_bins);

  out << "pepqubo " << a.version << " run report\n";
  out << "lattice points: " << a.lattice.size() << ", bonds: " << a.lattice.bonds.size()
      << ", stage-1 variables: " << a.stage1.num_vars() << '\n';
  out << "families: " << a.clustering.num_families << " (loss " << a.clustering.loss << ")\n";
  out << "contact number trace:";
  for (double c : a.contact_trace)
    out << ' ' << c;
  out << '\n';
  out << "stage-1 runs: " << a.stage1_runs.size() << ", feasible: " << feasible << '\n';
  out << "MEV min: " << spec.min << ", mean: " << spec.mean
      << ", distinct sequences: " << spec.distinct_sequences << '\n';
  for (std::size_t d = 0; d < a.designs.size(); ++d)
    out << "design " << d + 1 << ": " << a.designs[d].sequence << " families "
        << a.designs[d].family_sequence << " energy " << format_energy(a.designs[d].stage2_energy)
        << '\n';

  if (out_dir.empty())
    return;
  std::filesystem::create_directories(out_dir);
  {
    auto tsv = open_output(out_dir / "report.tsv");
    tsv << "restart\tseed\tenergy\tfeasible\tsequence\n";
    for (const auto &r : a.stage1_runs)
      tsv << r.result.restart_id << '\t' << r.result.seed << '\t' << format_energy(r.result.energy)
          << '\t' << (r.feasible ? "yes" : "no") << '\t' << r.sequence << '\n';
  }
  auto csv = open_output(out_dir / "spectrum.csv");
  write_spectrum_csv(csv, spec);
}

} // namespace pepqubo
