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

// JSON interchange for problems, lattices and fields.
//
// Problem files:
//   {
//     "form": "qubo" | "ising",
//     "num_vars": N,
//     "var_labels": [{"kind": "site", "point": i, "family": k}, ...],
//     "linear": [[index, value], ...],        // h for the ising form
//     "quadratic": [[i, j, value], ...],      // J for the ising form, i < j
//     "offset": c,
//     "meta": {"A", "w", "L0", "p", "D", "dims", "stage", "s", "t",
//              "literal_endpoint_signs"}
//   }
// Zero linear entries are omitted. Doubles are written in shortest
// round-trip form, so import(export(x)) == x.

#pragma once

#include <filesystem>

#include "json.hpp"

#include "pepqubo/pocket.hpp"
#include "pepqubo/qubo.hpp"

namespace pepqubo {

nlohmann::json to_json(const QuboProblem &q);
nlohmann::json to_json(const IsingProblem &q);
nlohmann::json to_json(const PocketLattice &lattice);
nlohmann::json to_json(const ExternalField &field);

QuboProblem qubo_from_json(const nlohmann::json &j);
IsingProblem ising_from_json(const nlohmann::json &j);
PocketLattice lattice_from_json(const nlohmann::json &j);
ExternalField field_from_json(const nlohmann::json &j);

/// Throws InputError on I/O failure.
void export_problem(const QuboProblem &q, const std::filesystem::path &path);
void export_problem(const IsingProblem &q, const std::filesystem::path &path);
QuboProblem import_qubo(const std::filesystem::path &path);
IsingProblem import_ising(const std::filesystem::path &path);

nlohmann::json read_json(const std::filesystem::path &path);
void write_json(const nlohmann::json &j, const std::filesystem::path &path);

} // namespace pepqubo
