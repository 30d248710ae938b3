#pragma once

// Multi-start maximization of W_k over pure preparations and cascade POVMs.
//
// Parameter layout (flat vector):
//   states : k+1 blocks of d coordinates (real) or d (re, im) pairs (complex),
//            normalized inside decode
//   povm   : k cascade steps; step i holds `rank` angles, followed for
//            i < k-1 by the Givens parameters of the rotation U_i:
//              real    d(d-1)/2 angles
//              complex d(d-1)/2 angles, d(d-1)/2 phases, d diagonal phases
// The last rotation of the cascade never influences the POVM (it cancels in
// the remainder element), so only k-1 rotations are stored.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nullwit/qcore.hpp"

namespace nullwit {

struct OptimConfig {
  int d = 2;
  int k = 2;
  Field field = Field::Real;
  int restarts = 64;
  int max_iterations = 3000;
  double step_tolerance = 1e-10;
  double value_tolerance = 1e-14;
  int povm_rank = 1;
  std::uint64_t seed = 0;
  int threads = 1;  // execution only; results do not depend on it

  /// 64 restarts for k <= 4, 256 for k = 5 and above.
  static int default_restarts(int k) { return k <= 4 ? 64 : 256; }
  void validate() const;
};

struct ParamLayout {
  int d = 0;
  int k = 0;
  int rank = 1;
  Field field = Field::Real;

  static ParamLayout of(const OptimConfig& cfg) { return {cfg.d, cfg.k, cfg.povm_rank, cfg.field}; }
  int state_block() const { return field == Field::Real ? d : 2 * d; }
  int state_count() const { return (k + 1) * state_block(); }
  int rotation_count() const { return field == Field::Real ? d * (d - 1) / 2 : d * d; }
  int povm_count() const { return k * rank + (k > 0 ? (k - 1) * rotation_count() : 0); }
  int size() const { return state_count() + povm_count(); }
};

struct ParamVector {
  std::vector<double> state;
  std::vector<double> povm;

  std::vector<double> flat() const;
  static ParamVector from_flat(std::span<const double> flat, const ParamLayout& layout);
};

/// Givens-sequence unitary: G_12 G_13 .. G_1d G_23 .. G_{d-1,d} diag(e^{i delta}).
/// Real: d(d-1)/2 angles. Complex: angles, then pair phases, then d phases.
CMatrix givens_unitary(int d, Field field, std::span<const double> params);

std::pair<PreparationEnsemble, Povm> decode(const ParamVector& params, const OptimConfig& cfg);

/// Probability matrix of a flat parameter vector without validation.
RMatrix decode_probabilities(std::span<const double> flat, const ParamLayout& layout);

double objective(const ParamVector& params, const OptimConfig& cfg);
double objective_flat(std::span<const double> flat, const ParamLayout& layout);

/// Inverse of decode for rank-1 configurations, up to one global unitary
/// applied to states and POVM (which leaves the witness unchanged).
/// `povm_vectors[i]` gives M_i = |m_i><m_i| for i = 0..k-1; the last element
/// is implied by completeness and checked against `last_element` if given.
ParamVector encode(std::span<const StateVector> states, std::span<const CVector> povm_vectors,
                   const OptimConfig& cfg, const CMatrix* last_element = nullptr);

// Generic derivative-based local search, shared by the witness search and
// the family-parameter regeneration tool.
struct LocalSearchOptions {
  int max_iterations = 3000;
  double step_tolerance = 1e-10;
  double value_tolerance = 1e-14;
  double fd_step = 1e-6;
  double max_step = 1.0;
  int nelder_mead_max_evals = 4000;
};

struct LocalSearchOutcome {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> history;  // best value after each iteration
  int iterations = 0;
  bool converged = false;
  bool used_fallback = false;
};

using Objective = std::function<double(std::span<const double>)>;
using Gradient = std::function<std::vector<double>(std::span<const double>)>;

/// Maximizes f by BFGS with central finite-difference gradients and an
/// Armijo backtracking line search; if the gradient direction stalls from a
/// fresh Hessian, switches to Nelder-Mead from the current point.
/// `gradient`, when given, replaces the generic finite differences.
LocalSearchOutcome maximize_local(const Objective& f, std::vector<double> start, const LocalSearchOptions& opts,
                                  const Gradient& gradient = {});

/// Nelder-Mead maximization; never returns a worse point than `start`.
LocalSearchOutcome nelder_mead_maximize(const Objective& f, std::vector<double> start, double initial_step,
                                        int max_evals, double value_tolerance);

struct OptimResult {
  double best_value = 0.0;
  ParamVector best_params;
  PreparationEnsemble ensemble;
  Povm povm;
  std::vector<double> per_restart_values;
  std::vector<double> history;  // of the best restart
  int iterations_used = 0;
  bool converged = false;
  bool short_circuit = false;  // exact construction, no search (d == 1 or d > k)
};

OptimResult local_search(const ParamVector& start, const OptimConfig& cfg);

/// Random start for restart index `restart` (stream id = restart).
ParamVector random_start(const OptimConfig& cfg, std::uint64_t restart);

OptimResult maximize_witness(const OptimConfig& cfg);

struct TableCell {
  int d = 0;
  int k = 0;
  Field field = Field::Real;
  double value = 0.0;
  std::optional<double> published_value;  // empty where the published table is blank
  double expected = 0.0;              // published value, or the real entry for blank cells
  bool bold = false;                  // marked as saturating in the published table
  double bound = 0.0;
  int restarts = 0;
  bool matched = false;
};

/// Tolerance for matching a cell: 1e-8 for zero cells, 2e-3 otherwise.
double table_tolerance(double expected);

/// Runs the (k <= 5, d <= 6) grid. `budget` caps restarts per cell; nullopt
/// uses OptimConfig::default_restarts.
std::vector<TableCell> table_reproduction(std::uint64_t seed, std::optional<int> budget, int threads = 1);

}  // namespace nullwit
