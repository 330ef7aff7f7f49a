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

// Command-line front end. Exit codes: 0 success, 1 infeasible, 2 input
// error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pepqubo/analysis.hpp"
#include "pepqubo/decode.hpp"
#include "pepqubo/interchange.hpp"
#include "pepqubo/pipeline.hpp"

using nlohmann::json;
using namespace pepqubo;

namespace {

constexpr int kExitInfeasible = 1;
constexpr int kExitInput = 2;

std::vector<Vec3> parse_points(const std::string &text) {
  std::vector<Vec3> out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos)
      continue;
    std::replace(item.begin(), item.end(), ',', ' ');
    std::istringstream in(item);
    Vec3 v;
    std::string extra;
    if (!(in >> v.x >> v.y >> v.z) || (in >> extra))
      throw InputError("expected points as 'x,y,z;x,y,z;...', got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write " + path);
  return out;
}

RawTables tables(const std::string &dir) {
  return load_raw_tables(dir.empty() ? default_data_dir() : std::filesystem::path(dir));
}

// Model described by a lattice file written by `lattice`.
InteractionModel model_from_lattice_file(const json &j, const RawTables &raw) {
  const auto &m = j.at("model");
  int D = m.at("families").get<int>();
  auto assignment = m.at("assignment").get<std::array<int, kNumResidues>>();
  auto clustering = evaluate_assignment(raw, assignment, D);
  return reduce_model(raw, clustering, m.at("cutoff").get<double>(), m.at("lambda").get<double>(),
                      m.at("e0").get<double>());
}

struct LatticeArgs {
  std::string structure, chains, reference, seeds, endpoints, data_dir, out = "lattice.json";
  double spacing = kDefaultSpacing, radius = kDefaultRadius, cutoff = kDefaultCutoff;
  double clash_factor = kDefaultClashFactor, lambda = kDefaultLambda, e0 = kDefaultE0;
  int families = 5;
  double contacts = 0.0;
  std::uint64_t clustering_seed = 1;
};

int cmd_lattice(const LatticeArgs &a) {
  RawTables raw = tables(a.data_dir);
  ProteinStructure protein = parse_structure(a.structure, a.chains);
  std::vector<Vec3> seeds;
  std::array<Vec3, 2> termini{};
  if (!a.reference.empty()) {
    for (const auto &r : parse_structure(a.reference).residues)
      seeds.push_back(r.ca);
    termini = {seeds.front(), seeds.back()};
  }
  auto extra = parse_points(a.seeds);
  seeds.insert(seeds.end(), extra.begin(), extra.end());
  if (seeds.empty())
    throw InputError("give --reference or --seeds");
  if (a.reference.empty())
    termini = {seeds.front(), seeds.back()};
  if (!a.endpoints.empty()) {
    auto e = parse_points(a.endpoints);
    if (e.size() != 2)
      throw InputError("--endpoints needs exactly two points");
    termini = {e[0], e[1]};
  }
  ClusteringOptions copt;
  copt.seed = a.clustering_seed;
  auto clustering = cluster_alphabet(raw, a.families, copt);
  auto model = reduce_model(raw, clustering, a.cutoff, a.lambda, a.e0);
  LatticeOptions lopt;
  lopt.radius = a.radius;
  lopt.spacing = a.spacing;
  lopt.clash_distance = clash_distance(raw, a.clash_factor);
  auto lattice = build_lattice(protein, seeds, lopt);
  std::tie(lattice.s, lattice.t) = choose_endpoints(lattice, termini[0], termini[1]);
  auto field = compute_external_field(lattice, protein, model, a.contacts);
  json out = {{"lattice", to_json(lattice)},
              {"field", to_json(field)},
              {"model",
               {{"families", a.families},
                {"assignment", clustering.assignment},
                {"cutoff", a.cutoff},
                {"lambda", a.lambda},
                {"e0", a.e0}}}};
  write_json(out, a.out);
  auto count = count_variables(lattice, a.families);
  std::cout << "lattice: " << lattice.size() << " points, " << lattice.bonds.size()
            << " bonds, dims " << lattice.dims[0] << "x" << lattice.dims[1] << "x"
            << lattice.dims[2] << ", s=" << lattice.s << " t=" << lattice.t << '\n'
            << "variables at D=" << a.families << ": annealer " << count.annealer << ", gate "
            << count.gate << '\n';
  return 0;
}

struct QuboArgs {
  std::string lattice, data_dir, out = "qubo.json", form = "qubo";
  int L0 = 10;
  double p = 0.0;
  std::optional<double> A, w;
  bool literal = false;
};

int cmd_qubo(const QuboArgs &a) {
  json j = read_json(a.lattice);
  RawTables raw = tables(a.data_dir);
  auto lattice = lattice_from_json(j.at("lattice"));
  auto field = field_from_json(j.at("field"));
  auto model = model_from_lattice_file(j, raw);
  Stage1Params params;
  params.L0 = a.L0;
  params.p = a.p;
  params.A = a.A;
  params.w = a.w;
  params.literal_endpoint_signs = a.literal;
  auto q = build_stage1_qubo(lattice, field, model, params);
  if (a.form == "ising")
    export_problem(to_ising(q), a.out);
  else
    export_problem(q, a.out);
  std::cout << "stage-1 problem: " << q.num_vars() << " variables, " << q.quadratic().size()
            << " couplings, A=" << q.meta.A << " w=" << q.meta.w << '\n';
  return 0;
}

struct SolveArgs {
  std::string problem, solver = "sa", out = "results.json";
  int restarts = 1;
  long long sweeps = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

int cmd_solve(const SolveArgs &a) {
  auto q = import_qubo(a.problem);
  RestartOptions opt;
  opt.solver = solver_from_string(a.solver);
  opt.restarts = a.restarts;
  opt.sweeps = a.sweeps;
  opt.base_seed = a.seed;
  opt.threads = a.threads;
  auto results = run_restarts(q, opt);
  write_json(results_to_json(results), a.out);
  double best = results.front().energy;
  for (const auto &r : results)
    best = std::min(best, r.energy);
  std::cout << results.size() << " runs, best energy " << best << '\n';
  return 0;
}

struct DecodeArgs {
  std::string problem, lattice, results, fasta, pdb;
};

int cmd_decode(const DecodeArgs &a) {
  auto q = import_qubo(a.problem);
  auto results = results_from_json(read_json(a.results));
  std::vector<std::pair<std::string, std::string>> fasta;
  std::ofstream pdb;
  if (!a.pdb.empty())
    pdb = open_out(a.pdb);
  int feasible = 0;
  if (q.meta.stage == "stage2") {
    for (const auto &r : results) {
      auto labels = decode_positions(r.bits, q.registry());
      std::cout << "run " << r.restart_id << " energy " << r.energy;
      if (!labels) {
        std::cout << " infeasible\n";
        continue;
      }
      std::string seq;
      for (int k : *labels)
        seq.push_back(AminoAcid(k).code());
      std::cout << " " << seq << '\n';
      fasta.emplace_back("run_" + std::to_string(r.restart_id), seq);
      ++feasible;
    }
  } else {
    if (a.lattice.empty())
      throw InputError("decoding a stage-1 problem needs --lattice");
    auto lattice = lattice_from_json(read_json(a.lattice).at("lattice"));
    for (const auto &r : results) {
      auto d = decode_bits(r.bits, q.registry(), lattice, q.meta);
      std::cout << "run " << r.restart_id << " energy " << r.energy;
      if (d.peptide)
        std::cout << " " << d.peptide->sequence();
      std::cout << (d.feasible() ? " feasible" : " infeasible") << '\n';
      for (const auto &v : d.report.violations)
        std::cout << "  " << v << '\n';
      if (!d.feasible())
        continue;
      ++feasible;
      fasta.emplace_back("run_" + std::to_string(r.restart_id), d.peptide->sequence());
      if (pdb.is_open())
        write_ca_model(pdb, pose_records(*d.peptide, lattice), r.restart_id + 1);
    }
  }
  if (!a.fasta.empty()) {
    auto out = open_out(a.fasta);
    write_fasta(out, fasta);
  }
  std::cout << feasible << "/" << results.size() << " feasible\n";
  return feasible > 0 ? 0 : kExitInfeasible;
}

struct PrArgs {
  std::string protein, chains, reference, poses, csv;
  double threshold = 0.5, cutoff = kDefaultCutoff;
};

int cmd_analyze_pr(const PrArgs &a) {
  auto protein = parse_structure(a.protein, a.chains);
  auto ref = read_poses(a.reference);
  auto native = native_contacts(ref.front(), protein, a.cutoff);
  auto poses = read_poses(a.poses);
  auto curve = pr_auc(poses, native, protein, a.threshold, a.cutoff);
  std::cout << "native contacts: " << native.size() << "\nposes: " << poses.size()
            << "\npositives: " << curve.positives << "\nauc: " << curve.auc << '\n';
  if (curve.no_positives)
    std::cout << "warning: no pose exceeds the f_nat threshold; auc set to 0\n";
  if (!a.csv.empty()) {
    auto out = open_out(a.csv);
    write_pr_csv(out, curve);
  }
  return 0;
}

struct HistArgs {
  std::string designed, reference, data_dir, csv, tsv;
  int families = 5, positions = 8;
  std::uint64_t clustering_seed = 1;
};

int cmd_analyze_hist(const HistArgs &a) {
  RawTables raw = tables(a.data_dir);
  ClusteringOptions copt;
  copt.seed = a.clustering_seed;
  auto clustering = cluster_alphabet(raw, a.families, copt);
  auto designed = family_histogram(read_sequences(a.designed), clustering, a.positions);
  auto reference = family_histogram(read_sequences(a.reference), clustering, a.positions);
  auto top2 = top2_containment(designed, reference);
  std::cout << "families:";
  for (int f = 0; f < a.families; ++f) {
    std::cout << " " << f << "=";
    for (int r = 0; r < kNumResidues; ++r)
      if (clustering.assignment[static_cast<std::size_t>(r)] == f)
        std::cout << kResidueCodes[static_cast<std::size_t>(r)];
  }
  std::cout << '\n';
  write_comparison_tsv(std::cout, designed, reference, top2);
  if (!a.csv.empty()) {
    auto d = open_out(a.csv + ".designed.csv");
    write_histogram_csv(d, designed);
    auto r = open_out(a.csv + ".reference.csv");
    write_histogram_csv(r, reference);
  }
  if (!a.tsv.empty()) {
    auto out = open_out(a.tsv);
    write_comparison_tsv(out, designed, reference, top2);
  }
  return 0;
}

struct SpectrumArgs {
  std::string results, problem, lattice, csv;
  int bins = 20;
};

int cmd_analyze_spectrum(const SpectrumArgs &a) {
  auto results = results_from_json(read_json(a.results));
  std::vector<double> energies;
  std::vector<std::string> sequences;
  for (const auto &r : results)
    energies.push_back(r.energy);
  if (!a.problem.empty() && !a.lattice.empty()) {
    auto q = import_qubo(a.problem);
    auto lattice = lattice_from_json(read_json(a.lattice).at("lattice"));
    for (const auto &rec : decode_runs(results, q, lattice))
      sequences.push_back(rec.feasible ? rec.sequence : std::string());
  }
  auto spec = mev_spectrum(energies, sequences, a.bins);
  std::cout << "results: " << spec.samples << "\nmin: " << spec.min << "\nmean: " << spec.mean
            << '\n';
  if (!sequences.empty())
    std::cout << "distinct sequences: " << spec.distinct_sequences << '\n';
  if (a.csv.empty()) {
    write_spectrum_csv(std::cout, spec);
  } else {
    auto out = open_out(a.csv);
    write_spectrum_csv(out, spec);
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Peptide design on a pocket lattice via QUBO"};
  app.require_subcommand(1);

  LatticeArgs la;
  auto *lat = app.add_subcommand("lattice", "Build the pocket lattice and external field");
  lat->add_option("--structure", la.structure, "Protein PDB file")->required();
  lat->add_option("--chains", la.chains, "Chain identifiers to keep");
  lat->add_option("--reference", la.reference, "Reference peptide PDB (seeds and termini)");
  lat->add_option("--seeds", la.seeds, "Seed points 'x,y,z;x,y,z;...'");
  lat->add_option("--endpoints", la.endpoints, "Two points 'x,y,z;x,y,z' for s and t");
  lat->add_option("--spacing", la.spacing, "Grid spacing (A)")->capture_default_str();
  lat->add_option("--radius", la.radius, "Pocket radius around seeds (A)")->capture_default_str();
  lat->add_option("--cutoff", la.cutoff, "Interaction cutoff (A)")->capture_default_str();
  lat->add_option("--clash-factor", la.clash_factor, "Clash distance / smallest diameter")
      ->capture_default_str();
  lat->add_option("--families", la.families, "Reduced alphabet size")->capture_default_str();
  lat->add_option("--contacts", la.contacts, "Contact number Nc")->capture_default_str();
  lat->add_option("--clustering-seed", la.clustering_seed)->capture_default_str();
  lat->add_option("--data-dir", la.data_dir, "Table directory");
  lat->add_option("-o,--out", la.out)->capture_default_str();

  QuboArgs qa;
  auto *qub = app.add_subcommand("qubo", "Build the stage-1 problem from a lattice file");
  qub->add_option("--lattice", qa.lattice)->required();
  qub->add_option("--L0", qa.L0, "Target number of bonds")->capture_default_str();
  qub->add_option("--p", qa.p, "Allowed relative length deviation")->capture_default_str();
  qub->add_option("--A", qa.A, "Constraint penalty (default from coefficients)");
  qub->add_option("--w", qa.w, "Length weight (default from A)");
  qub->add_flag("--literal-endpoint-signs", qa.literal);
  qub->add_option("--form", qa.form)->check(CLI::IsMember({"qubo", "ising"}))->capture_default_str();
  qub->add_option("--data-dir", qa.data_dir);
  qub->add_option("-o,--out", qa.out)->capture_default_str();

  SolveArgs sa;
  auto *sol = app.add_subcommand("solve", "Minimize an exported QUBO");
  sol->add_option("--problem", sa.problem)->required();
  sol->add_option("--solver", sa.solver)->check(CLI::IsMember({"exact", "sa"}))->capture_default_str();
  sol->add_option("--restarts", sa.restarts)->capture_default_str();
  sol->add_option("--sweeps", sa.sweeps)->capture_default_str();
  sol->add_option("--seed", sa.seed)->capture_default_str();
  sol->add_option("--threads", sa.threads)->capture_default_str();
  sol->add_option("--export,-o", sa.out, "Results file")->capture_default_str();

  DecodeArgs da;
  auto *dec = app.add_subcommand("decode", "Decode solver results into peptides");
  dec->add_option("--problem", da.problem)->required();
  dec->add_option("--lattice", da.lattice);
  dec->add_option("--results", da.results)->required();
  dec->add_option("--fasta", da.fasta);
  dec->add_option("--pdb", da.pdb);

  auto *ana = app.add_subcommand("analyze", "Pose and sequence analyses");
  ana->require_subcommand(1);
  PrArgs pa;
  auto *pr = ana->add_subcommand("pr", "Native-contact precision-recall over ranked poses");
  pr->add_option("--protein", pa.protein)->required();
  pr->add_option("--chains", pa.chains);
  pr->add_option("--reference", pa.reference, "Reference pose (first model used)")->required();
  pr->add_option("--poses", pa.poses, "Ranked poses")->required();
  pr->add_option("--threshold", pa.threshold)->capture_default_str();
  pr->add_option("--cutoff", pa.cutoff)->capture_default_str();
  pr->add_option("--csv", pa.csv);
  HistArgs ha;
  auto *hist = ana->add_subcommand("hist", "Per-position family frequencies");
  hist->add_option("--designed", ha.designed)->required();
  hist->add_option("--reference", ha.reference)->required();
  hist->add_option("--families", ha.families)->capture_default_str();
  hist->add_option("--positions", ha.positions)->capture_default_str();
  hist->add_option("--clustering-seed", ha.clustering_seed)->capture_default_str();
  hist->add_option("--data-dir", ha.data_dir);
  hist->add_option("--csv", ha.csv, "Prefix for the two CSV tables");
  hist->add_option("--tsv", ha.tsv, "Comparison report");
  SpectrumArgs spa;
  auto *spec = ana->add_subcommand("spectrum", "MEV spectrum of solver results");
  spec->add_option("--results", spa.results)->required();
  spec->add_option("--problem", spa.problem);
  spec->add_option("--lattice", spa.lattice);
  spec->add_option("--bins", spa.bins)->capture_default_str();
  spec->add_option("--csv", spa.csv);

  std::string config_path, out_dir;
  bool scan = false;
  std::optional<std::uint64_t> seed;
  auto *pipe = app.add_subcommand("pipeline", "Two-stage design from a config file");
  pipe->add_option("--config", config_path)->required();
  pipe->add_option("--out", out_dir, "Override the output directory");
  pipe->add_option("--seed", seed, "Override the base seed");
  pipe->add_flag("--scan-endpoints", scan, "Also try boundary endpoint pairs");

  std::string archive_path, report_dir;
  auto *rep = app.add_subcommand("report", "Summarize a run archive");
  rep->add_option("--archive", archive_path)->required();
  rep->add_option("--out", report_dir, "Directory for report.tsv and spectrum.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*lat)
      return cmd_lattice(la);
    if (*qub)
      return cmd_qubo(qa);
    if (*sol)
      return cmd_solve(sa);
    if (*dec)
      return cmd_decode(da);
    if (*pr)
      return cmd_analyze_pr(pa);
    if (*hist)
      return cmd_analyze_hist(ha);
    if (*spec)
      return cmd_analyze_spectrum(spa);
    if (*pipe) {
      RunConfig c = load_config(config_path);
      if (!out_dir.empty())
        c.output_dir = std::filesystem::absolute(out_dir).string();
      if (seed)
        c.seed = *seed;
      if (scan)
        c.scan_endpoints = true;
      cmd_pipeline(c, &std::cout);
      return 0;
    }
    if (*rep) {
      cmd_report(load_archive(archive_path), std::cout, report_dir);
      return 0;
    }
  } catch (const InfeasibleError &e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ContactConvergenceError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
