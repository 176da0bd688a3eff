// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dfrc/phase_vector.hpp"

namespace dfrc {

struct TraceRecord {
  std::size_t iteration = 0;
  double objective = 0.0;  // true design objective after this iteration
  double surrogate = 0.0;  // value of the maximized surrogate (engine specific)
  double gamma_r = 0.0;
  double gamma_u = 0.0;
  std::int64_t wall_ns = 0;  // elapsed since the solver started
  double change_norm = 0.0;  // ||phi_{t+1} - phi_t||
  double step = 0.0;         // line-search step (RMO) or BnB gap (MBnB)
};

struct SolverTrace {
  double initial_objective = 0.0;
  std::vector<TraceRecord> records;
  bool converged = false;
  /// Elements whose update was undefined (zero modulus) and kept their phase.
  std::size_t flagged_entries = 0;

  std::size_t iterations() const { return records.size(); }
  double final_objective() const { return records.empty() ? initial_objective : records.back().objective; }
};

/// Called with every phase iterate an engine produces (including the start).
using IterateObserver = std::function<void(const PhaseVector&)>;

struct PhaseSolveResult {
  PhaseVector phi;
  SolverTrace trace;
  bool converged = false;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::int64_t elapsed_ns() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

double phase_change_norm(const PhaseVector& a, const PhaseVector& b);

}  // namespace dfrc
