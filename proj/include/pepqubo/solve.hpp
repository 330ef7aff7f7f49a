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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pepqubo/qubo.hpp"

namespace pepqubo {

struct SolveResult {
  Bits bits;
  double energy = 0.0;
  std::string solver;
  double wall_time = 0.0; // seconds
  int restart_id = 0;
  std::uint64_t seed = 0;
};

/// Geometric cooling from t_hot to t_cold over `sweeps` single-flip
/// sweeps. A temperature of 0 means greedy descent.
struct AnnealSchedule {
  long long sweeps = 100000;
  double t_hot = 1.0;
  double t_cold = 1e-3;
  std::uint64_t seed = 0;
  /// Start state; random when empty.
  Bits initial;

  /// Throws DomainError for negative or increasing temperatures or
  /// sweeps < 1.
  void validate() const;
  double temperature(long long sweep) const;
};

/// t_hot = max |coefficient|, t_cold = 1e-3 * median |non-zero coefficient|.
AnnealSchedule default_schedule(const QuboProblem &problem, long long sweeps = 100000,
                                std::uint64_t seed = 0);

/// Exhaustive enumeration; ties broken by the lexicographically smallest
/// bit vector. Throws DomainError above `max_vars` variables.
SolveResult solve_exact(const QuboProblem &problem, int max_vars = 24);

/// Metropolis single-flip annealing. Returns the best state seen; when
/// `best_trace` is given it receives the best energy after every sweep.
SolveResult solve_sa(const QuboProblem &problem, const AnnealSchedule &schedule,
                     std::vector<double> *best_trace = nullptr);

enum class SolverKind { Exact, Anneal };

SolverKind solver_from_string(const std::string &name);
std::string to_string(SolverKind kind);

struct RestartOptions {
  SolverKind solver = SolverKind::Anneal;
  int restarts = 1;
  std::uint64_t base_seed = 0;
  long long sweeps = 100000;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Seed of restart `id`; a splitmix64 step of base_seed + id.
std::uint64_t restart_seed(std::uint64_t base_seed, int id);

/// `restarts` independent runs, returned in restart_id order.
std::vector<SolveResult> run_restarts(const QuboProblem &problem, const RestartOptions &options);

} // namespace pepqubo
