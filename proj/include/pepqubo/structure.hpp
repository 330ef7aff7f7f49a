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
#include <string>
#include <vector>

#include "pepqubo/chem_model.hpp"
#include "pepqubo/common.hpp"

namespace pepqubo {

struct Residue {
  AminoAcid type;
  Vec3 ca;
  char chain = ' ';
  int number = 0;
  char insertion = ' ';
};

/// One bead per residue at its C-alpha position.
struct ProteinStructure {
  std::vector<Residue> residues;
};

/// Reads ATOM records of the first MODEL. Only C-alpha atoms are kept; for
/// alternate locations the first one wins. `chains`, when non-empty,
/// restricts parsing to the listed chain identifiers.
///
/// Throws InputError on malformed coordinates, unknown residue names, or a
/// file without any C-alpha atom.
ProteinStructure parse_structure(const std::filesystem::path &path,
                                 const std::string &chains = {});
ProteinStructure parse_structure(std::istream &in, const std::string &chains = {});

/// Every MODEL of a multi-model file, in file order. A file without MODEL
/// records is a single model.
std::vector<ProteinStructure> parse_models(std::istream &in, const std::string &chains = {});
std::vector<ProteinStructure> parse_models(const std::filesystem::path &path,
                                           const std::string &chains = {});

struct CaRecord {
  /// Residue name, at most three characters.
  std::string name;
  Vec3 position;
};

/// Writes one MODEL block with a CA record per bead, followed by ENDMDL.
void write_ca_model(std::ostream &out, const std::vector<CaRecord> &records, int model,
                    char chain = 'P');

} // namespace pepqubo
