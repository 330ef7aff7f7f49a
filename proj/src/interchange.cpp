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

#include "pepqubo/interchange.hpp"

#include <fstream>

using nlohmann::json;

namespace pepqubo {

namespace {

json labels_to_json(const VariableRegistry &reg) {
  json out = json::array();
  for (const auto &l : reg.labels()) {
    json e = {{"kind", to_string(l.kind)}};
    switch (l.kind) {
    case VarKind::Site:
      e["point"] = l.a;
      e["family"] = l.family;
      break;
    case VarKind::Bond:
      e["points"] = {l.a, l.b};
      break;
    case VarKind::Ancilla:
      e["points"] = {l.a, l.b};
      e["family"] = l.family;
      break;
    case VarKind::Position:
      e["position"] = l.a;
      e["family"] = l.family;
      break;
    }
    out.push_back(std::move(e));
  }
  return out;
}

VariableRegistry labels_from_json(const json &arr) {
  std::vector<VariableLabel> labels;
  labels.reserve(arr.size());
  for (const auto &e : arr) {
    VariableLabel l;
    l.kind = var_kind_from_string(e.at("kind").get<std::string>());
    switch (l.kind) {
    case VarKind::Site:
      l.a = e.at("point").get<int>();
      l.family = e.at("family").get<int>();
      break;
    case VarKind::Bond:
      l.a = e.at("points").at(0).get<int>();
      l.b = e.at("points").at(1).get<int>();
      break;
    case VarKind::Ancilla:
      l.a = e.at("points").at(0).get<int>();
      l.b = e.at("points").at(1).get<int>();
      l.family = e.at("family").get<int>();
      break;
    case VarKind::Position:
      l.a = e.at("position").get<int>();
      l.family = e.at("family").get<int>();
      break;
    }
    labels.push_back(l);
  }
  return VariableRegistry::from_labels(std::move(labels));
}

json meta_to_json(const ProblemMeta &m) {
  return {{"stage", m.stage}, {"A", m.A},   {"w", m.w},       {"L0", m.L0},
          {"p", m.p},         {"D", m.D},   {"dims", m.dims}, {"s", m.s},
          {"t", m.t},         {"literal_endpoint_signs", m.literal_endpoint_signs}};
}

ProblemMeta meta_from_json(const json &j) {
  ProblemMeta m;
  m.stage = j.value("stage", std::string());
  m.A = j.value("A", 0.0);
  m.w = j.value("w", 0.0);
  m.L0 = j.value("L0", 0);
  m.p = j.value("p", 0.0);
  m.D = j.value("D", 0);
  if (j.contains("dims"))
    m.dims = j.at("dims").get<std::array<int, 3>>();
  m.s = j.value("s", -1);
  m.t = j.value("t", -1);
  m.literal_endpoint_signs = j.value("literal_endpoint_signs", false);
  return m;
}

json problem_json(const char *form, const VariableRegistry &reg, const std::vector<double> &linear,
                  const std::map<PairKey, double> &quadratic, double offset,
                  const ProblemMeta &meta) {
  json lin = json::array();
  for (std::size_t i = 0; i < linear.size(); ++i)
    if (linear[i] != 0.0)
      lin.push_back({static_cast<int>(i), linear[i]});
  json quad = json::array();
  for (const auto &[key, c] : quadratic)
    quad.push_back({key.first, key.second, c});
  return {{"form", form},           {"num_vars", reg.total()}, {"var_labels", labels_to_json(reg)},
          {"linear", std::move(lin)}, {"quadratic", std::move(quad)}, {"offset", offset},
          {"meta", meta_to_json(meta)}};
}

void check_form(const json &j, const std::string &form) {
  if (j.value("form", std::string()) != form)
    throw InputError("expected a '" + form + "' problem file");
  if (j.at("num_vars").get<int>() != static_cast<int>(j.at("var_labels").size()))
    throw InputError("num_vars does not match the label count");
}

} // namespace

json to_json(const QuboProblem &q) {
  return problem_json("qubo", q.registry(), q.linear(), q.quadratic(), q.offset(), q.meta);
}

json to_json(const IsingProblem &q) {
  return problem_json("ising", q.registry, q.h, q.J, q.offset, q.meta);
}

QuboProblem qubo_from_json(const json &j) {
  try {
    check_form(j, "qubo");
    QuboProblem q(labels_from_json(j.at("var_labels")));
    for (const auto &e : j.at("linear"))
      q.add_linear(e.at(0).get<int>(), e.at(1).get<double>());
    for (const auto &e : j.at("quadratic"))
      q.add_quadratic(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
    q.add_offset(j.at("offset").get<double>());
    q.meta = meta_from_json(j.value("meta", json::object()));
    return q;
  } catch (const json::exception &ex) {
    throw InputError(std::string("malformed problem file: ") + ex.what());
  }
}

IsingProblem ising_from_json(const json &j) {
  try {
    check_form(j, "ising");
    IsingProblem q;
    q.registry = labels_from_json(j.at("var_labels"));
    q.h.assign(static_cast<std::size_t>(q.registry.total()), 0.0);
    for (const auto &e : j.at("linear")) {
      auto i = e.at(0).get<std::size_t>();
      if (i >= q.h.size())
        throw InputError("field index out of range");
      q.h[i] += e.at(1).get<double>();
    }
    for (const auto &e : j.at("quadratic")) {
      int a = e.at(0).get<int>();
      int b = e.at(1).get<int>();
      if (a > b)
        std::swap(a, b);
      q.J[{a, b}] += e.at(2).get<double>();
    }
    q.offset = j.at("offset").get<double>();
    q.meta = meta_from_json(j.value("meta", json::object()));
    return q;
  } catch (const json::exception &ex) {
    throw InputError(std::string("malformed problem file: ") + ex.what());
  }
}

json to_json(const PocketLattice &lattice) {
  json points = json::array();
  for (const auto &p : lattice.points)
    points.push_back({p.x, p.y, p.z});
  return {{"spacing", lattice.spacing},
          {"origin", {lattice.origin.x, lattice.origin.y, lattice.origin.z}},
          {"grid", lattice.grid},
          {"points", std::move(points)},
          {"bonds", lattice.bonds},
          {"dims", lattice.dims},
          {"s", lattice.s},
          {"t", lattice.t}};
}

PocketLattice lattice_from_json(const json &j) {
  try {
    PocketLattice lattice;
    lattice.spacing = j.at("spacing").get<double>();
    auto o = j.at("origin").get<std::array<double, 3>>();
    lattice.origin = {o[0], o[1], o[2]};
    lattice.grid = j.at("grid").get<std::vector<GridIndex>>();
    for (const auto &p : j.at("points")) {
      auto c = p.get<std::array<double, 3>>();
      lattice.points.push_back({c[0], c[1], c[2]});
    }
    lattice.bonds = j.at("bonds").get<std::vector<std::pair<int, int>>>();
    lattice.s = j.value("s", -1);
    lattice.t = j.value("t", -1);
    if (lattice.grid.size() != lattice.points.size())
      throw InputError("lattice grid and point lists differ in length");
    lattice.finalize();
    return lattice;
  } catch (const json::exception &ex) {
    throw InputError(std::string("malformed lattice: ") + ex.what());
  }
}

json to_json(const ExternalField &field) {
  return {{"num_points", field.num_points},
          {"num_families", field.num_families},
          {"contacts", field.contacts},
          {"energy", field.energy},
          {"offset", field.offset}};
}

ExternalField field_from_json(const json &j) {
  try {
    ExternalField f;
    f.num_points = j.at("num_points").get<int>();
    f.num_families = j.at("num_families").get<int>();
    f.contacts = j.at("contacts").get<double>();
    f.energy = j.at("energy").get<std::vector<double>>();
    f.offset = j.at("offset").get<std::vector<double>>();
    if (f.energy.size() != static_cast<std::size_t>(f.num_points * f.num_families) ||
        f.offset.size() != static_cast<std::size_t>(f.num_families))
      throw InputError("field table sizes are inconsistent");
    return f;
  } catch (const json::exception &ex) {
    throw InputError(std::string("malformed field: ") + ex.what());
  }
}

json read_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &ex) {
    throw InputError(path.string() + ": " + ex.what());
  }
}

void write_json(const json &j, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out)
    throw InputError("write failed: " + path.string());
}

void export_problem(const QuboProblem &q, const std::filesystem::path &path) {
  write_json(to_json(q), path);
}

void export_problem(const IsingProblem &q, const std::filesystem::path &path) {
  write_json(to_json(q), path);
}

QuboProblem import_qubo(const std::filesystem::path &path) { return qubo_from_json(read_json(path)); }

IsingProblem import_ising(const std::filesystem::path &path) {
  return ising_from_json(read_json(path));
}

} // namespace pepqubo
