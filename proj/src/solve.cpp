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

#include "pepqubo/solve.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

namespace pepqubo {

namespace {

// Neighbor lists of the quadratic part, CSR layout.
struct Adjacency {
  std::vector<std::size_t> start;
  std::vector<int> index;
  std::vector<double> coef;

  explicit Adjacency(const QuboProblem &q) {
    const auto n = static_cast<std::size_t>(q.num_vars());
    std::vector<std::size_t> degree(n, 0);
    for (const auto &[key, c] : q.quadratic()) {
      ++degree[static_cast<std::size_t>(key.first)];
      ++degree[static_cast<std::size_t>(key.second)];
    }
    start.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
      start[i + 1] = start[i] + degree[i];
    index.resize(start[n]);
    coef.resize(start[n]);
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (const auto &[key, c] : q.quadratic()) {
      auto a = static_cast<std::size_t>(key.first);
      auto b = static_cast<std::size_t>(key.second);
      index[fill[a]] = key.second;
      coef[fill[a]++] = c;
      index[fill[b]] = key.first;
      coef[fill[b]++] = c;
    }
  }
};

// g_i = linear_i + sum_j Q_ij x_j; flipping i changes the energy by
// (1 - 2 x_i) g_i.
class LocalFields {
public:
  LocalFields(const QuboProblem &q, const Adjacency &adj, const Bits &x)
      : adj_(adj), g_(q.linear()) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i])
        for (std::size_t e = adj.start[i]; e < adj.start[i + 1]; ++e)
          g_[static_cast<std::size_t>(adj.index[e])] += adj.coef[e];
  }

  double delta(const Bits &x, std::size_t i) const { return x[i] ? -g_[i] : g_[i]; }

  void flip(Bits &x, std::size_t i) {
    double sign = x[i] ? -1.0 : 1.0;
    x[i] ^= 1u;
    for (std::size_t e = adj_.start[i]; e < adj_.start[i + 1]; ++e)
      g_[static_cast<std::size_t>(adj_.index[e])] += sign * adj_.coef[e];
  }

private:
  const Adjacency &adj_;
  std::vector<double> g_;
};

double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

void AnnealSchedule::validate() const {
  if (sweeps < 1)
    throw DomainError("annealing needs at least one sweep");
  if (!(t_hot >= 0.0) || !(t_cold >= 0.0))
    throw DomainError("temperatures must be non-negative");
  if (t_cold > t_hot)
    throw DomainError("temperatures must be non-increasing");
}

double AnnealSchedule::temperature(long long sweep) const {
  if (sweeps <= 1 || t_hot == t_cold)
    return t_hot;
  double frac = static_cast<double>(sweep) / static_cast<double>(sweeps - 1);
  if (t_cold == 0.0)
    return t_hot * (1.0 - frac);
  return t_hot * std::pow(t_cold / t_hot, frac);
}

AnnealSchedule default_schedule(const QuboProblem &problem, long long sweeps, std::uint64_t seed) {
  std::vector<double> mags;
  for (double c : problem.linear())
    if (c != 0.0)
      mags.push_back(std::abs(c));
  for (const auto &[key, c] : problem.quadratic())
    if (c != 0.0)
      mags.push_back(std::abs(c));
  AnnealSchedule s;
  s.sweeps = sweeps;
  s.seed = seed;
  if (mags.empty())
    return s;
  auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  double median = *mid;
  if (mags.size() % 2 == 0)
    median = 0.5 * (median + *std::max_element(mags.begin(), mid));
  s.t_hot = *std::max_element(mags.begin(), mags.end());
  s.t_cold = std::min(s.t_hot, 1e-3 * median);
  return s;
}

SolveResult solve_exact(const QuboProblem &problem, int max_vars) {
  const int n = problem.num_vars();
  if (n > max_vars)
    throw DomainError("exact solver limited to " + std::to_string(max_vars) + " variables, got " +
                      std::to_string(n));
  auto t0 = std::chrono::steady_clock::now();
  Adjacency adj(problem);
  Bits x(static_cast<std::size_t>(n), 0);
  LocalFields fields(problem, adj, x);

  double running = problem.offset();
  Bits best = x;
  double best_energy = problem.energy(x);

  // Gray-code walk; the running energy only filters candidates, the
  // comparison itself uses freshly evaluated energies.
  const std::uint64_t states = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < states; ++k) {
    auto i = static_cast<std::size_t>(std::countr_zero(k));
    running += fields.delta(x, i);
    fields.flip(x, i);
    double scale = 1.0 + std::abs(best_energy);
    if (running > best_energy + 1e-6 * scale)
      continue;
    double e = problem.energy(x);
    double tie = 1e-9 * scale;
    if (e < best_energy - tie || (std::abs(e - best_energy) <= tie && x < best)) {
      best = x;
      best_energy = e;
    }
  }

  SolveResult r;
  r.bits = std::move(best);
  r.energy = problem.energy(r.bits);
  r.solver = "exact";
  r.wall_time = seconds_since(t0);
  return r;
}

SolveResult solve_sa(const QuboProblem &problem, const AnnealSchedule &schedule,
                     std::vector<double> *best_trace) {
  schedule.validate();
  auto t0 = std::chrono::steady_clock::now();
  const auto n = static_cast<std::size_t>(problem.num_vars());
  std::mt19937_64 rng(schedule.seed);

  Bits x;
  if (!schedule.initial.empty()) {
    if (schedule.initial.size() != n)
      throw DomainError("initial state length does not match the problem");
    x = schedule.initial;
  } else {
    x.resize(n);
    for (auto &b : x)
      b = static_cast<unsigned char>(rng() & 1u);
  }

  Adjacency adj(problem);
  LocalFields fields(problem, adj, x);
  double energy = problem.energy(x);
  Bits best = x;
  double best_energy = energy;
  if (best_trace)
    best_trace->clear();

  for (long long sweep = 0; sweep < schedule.sweeps; ++sweep) {
    const double temp = schedule.temperature(sweep);
    for (std::size_t i = 0; i < n; ++i) {
      double d = fields.delta(x, i);
      bool accept = temp > 0.0 ? (d <= 0.0 || uniform01(rng) < std::exp(-d / temp)) : d < 0.0;
      if (!accept)
        continue;
      fields.flip(x, i);
      energy += d;
      if (energy < best_energy) {
        best_energy = energy;
        best = x;
      }
    }
    if (best_trace)
      best_trace->push_back(best_energy);
  }

  SolveResult r;
  r.bits = std::move(best);
  r.energy = problem.energy(r.bits);
  r.solver = "sa";
  r.wall_time = seconds_since(t0);
  r.seed = schedule.seed;
  return r;
}

SolverKind solver_from_string(const std::string &name) {
  if (name == "exact")
    return SolverKind::Exact;
  if (name == "sa")
    return SolverKind::Anneal;
  throw InputError("unknown solver '" + name + "' (expected exact or sa)");
}

std::string to_string(SolverKind kind) { return kind == SolverKind::Exact ? "exact" : "sa"; }

std::uint64_t restart_seed(std::uint64_t base_seed, int id) {
  std::uint64_t z = base_seed + static_cast<std::uint64_t>(id) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<SolveResult> run_restarts(const QuboProblem &problem, const RestartOptions &options) {
  if (options.restarts < 1)
    throw DomainError("at least one restart is required");
  std::vector<SolveResult> results(static_cast<std::size_t>(options.restarts));

  auto run_one = [&](int id) {
    SolveResult r;
    std::uint64_t seed = restart_seed(options.base_seed, id);
    if (options.solver == SolverKind::Exact) {
      r = solve_exact(problem);
    } else {
      r = solve_sa(problem, default_schedule(problem, options.sweeps, seed));
    }
    r.restart_id = id;
    r.seed = seed;
    results[static_cast<std::size_t>(id)] = std::move(r);
  };

  unsigned workers = options.threads ? options.threads : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(options.restarts));
  if (workers == 1) {
    for (int id = 0; id < options.restarts; ++id)
      run_one(id);
    return results;
  }

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int id = next++; id < options.restarts; id = next++)
            run_one(id);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return results;
}

} // namespace pepqubo
