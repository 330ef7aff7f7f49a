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

#include "pepqubo/structure.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

namespace pepqubo {

namespace {

/*
 ATOM record columns (1-based, inclusive):
   1-6 record, 13-16 atom name, 17 altLoc, 18-20 resName, 22 chain,
   23-26 resSeq, 27 iCode, 31-38 x, 39-46 y, 47-54 z
*/

std::string field(const std::string &line, std::size_t begin, std::size_t len) {
  if (begin >= line.size())
    return {};
  return line.substr(begin, len);
}

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double coordinate(const std::string &line, std::size_t begin, int line_no) {
  std::string tok = trim(field(line, begin, 8));
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v))
      throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw InputError("malformed coordinate on line " + std::to_string(line_no) + ": '" + tok +
                     "'");
  }
}

int residue_number(const std::string &line, int line_no) {
  std::string tok = trim(field(line, 22, 4));
  try {
    return std::stoi(tok);
  } catch (const std::exception &) {
    throw InputError("malformed residue number on line " + std::to_string(line_no));
  }
}

std::vector<ProteinStructure> parse(std::istream &in, const std::string &chains,
                                    std::size_t max_models) {
  std::vector<ProteinStructure> models;
  ProteinStructure current;
  std::set<std::tuple<char, int, char>> seen;
  bool in_model = false;
  int line_no = 0;

  auto finish = [&] {
    if (current.residues.empty())
      throw InputError("no C-alpha atoms" +
                       (models.empty() ? std::string() : " in model " +
                                                             std::to_string(models.size() + 1)));
    models.push_back(std::move(current));
    current = {};
    seen.clear();
  };

  std::string line;
  while (std::getline(in, line) && models.size() < max_models) {
    ++line_no;
    if (line.rfind("MODEL", 0) == 0) {
      if (in_model || !current.residues.empty())
        finish();
      in_model = true;
      continue;
    }
    if (line.rfind("ENDMDL", 0) == 0) {
      finish();
      in_model = false;
      continue;
    }
    if (line.rfind("ATOM  ", 0) != 0)
      continue;
    if (line.size() < 54)
      throw InputError("truncated ATOM record on line " + std::to_string(line_no));
    if (trim(field(line, 12, 4)) != "CA")
      continue;
    char chain = line[21];
    if (!chains.empty() && chains.find(chain) == std::string::npos)
      continue;
    int number = residue_number(line, line_no);
    char icode = line[26];
    if (!seen.insert({chain, number, icode}).second)
      continue; // alternate location of a residue already read

    Residue res;
    res.type = AminoAcid::from_three_letter(trim(field(line, 17, 3)));
    res.ca = {coordinate(line, 30, line_no), coordinate(line, 38, line_no),
              coordinate(line, 46, line_no)};
    res.chain = chain;
    res.number = number;
    res.insertion = icode;
    current.residues.push_back(res);
  }
  if (models.size() < max_models && (in_model || !current.residues.empty() || models.empty()))
    finish();
  return models;
}

std::ifstream open(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open structure file: " + path.string());
  return in;
}

} // namespace

ProteinStructure parse_structure(std::istream &in, const std::string &chains) {
  return std::move(parse(in, chains, 1).front());
}

ProteinStructure parse_structure(const std::filesystem::path &path, const std::string &chains) {
  auto in = open(path);
  return parse_structure(in, chains);
}

std::vector<ProteinStructure> parse_models(std::istream &in, const std::string &chains) {
  return parse(in, chains, std::numeric_limits<std::size_t>::max());
}

std::vector<ProteinStructure> parse_models(const std::filesystem::path &path,
                                           const std::string &chains) {
  auto in = open(path);
  return parse_models(in, chains);
}

void write_ca_model(std::ostream &out, const std::vector<CaRecord> &records, int model,
                    char chain) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "MODEL     %4d\n", model);
  out << buf;
  int serial = 1;
  for (const auto &rec : records) {
    std::snprintf(buf, sizeof buf,
                  "ATOM  %5d  CA  %3.3s %c%4d    %8.3f%8.3f%8.3f  1.00  0.00           C\n",
                  serial, rec.name.c_str(), chain, serial, rec.position.x, rec.position.y,
                  rec.position.z);
    out << buf;
    ++serial;
  }
  out << "ENDMDL\n";
}

} // namespace pepqubo
