#pragma once

// Finite-statistics analysis of the witness: adjugate, first-order shift,
// per-trial variance of the empirical witness, multinomial sampling and the
// null-hypothesis decision.

#include <cstdint>
#include <optional>

#include "nullwit/qcore.hpp"
#include "nullwit/witness.hpp"

namespace nullwit {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

class ExperimentCounts {
 public:
  /// Every column must sum exactly to `trials`; entries non-negative.
  ExperimentCounts(CountMatrix counts, std::int64_t trials);

  const CountMatrix& counts() const { return counts_; }
  std::int64_t trials() const { return trials_; }
  int rows() const { return static_cast<int>(counts_.rows()); }
  int cols() const { return static_cast<int>(counts_.cols()); }

 private:
  CountMatrix counts_;
  std::int64_t trials_;
};

/// Transpose of the cofactor matrix, p A = A p = det(p) 1. Each cofactor is
/// an LU determinant of the corresponding minor, so singular p is fine.
RMatrix adjugate(const RMatrix& p);

/// tr(dp A) = sum_ij dp_ij A_ji with A = adjugate(p).
double first_order_shift(const RMatrix& p, const RMatrix& dp);

struct VarianceForms {
  double centered = 0.0;  // sum_ij p_ij (A_ji - Abar_j)^2
  double expanded = 0.0;  // sum_ij p_ij (A_ji^2 - Abar_j^2)
};

/// Both algebraic forms of the per-trial variance N <(dW)^2>.
VarianceForms witness_variance_forms(const RMatrix& p);
inline double witness_variance(const RMatrix& p) { return witness_variance_forms(p).centered; }
inline double witness_variance(const ProbabilityMatrix& p) { return witness_variance(p.matrix()); }

/// Independent multinomial(N, column j) draws, by sequential binomial conditioning.
ExperimentCounts sample_counts(const ProbabilityMatrix& p, std::int64_t trials, RngStream& rng);

ProbabilityMatrix empirical_probability(const ExperimentCounts& c);

/// N times the sample variance of the empirical witness over `repetitions`
/// independent count matrices; repetition r uses rng.derive(r).
double monte_carlo_variance(const ProbabilityMatrix& p, std::int64_t trials, int repetitions,
                            const RngStream& rng);

/// Sample mean and variance (not N-scaled) of the empirical witness.
struct WitnessSampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};
WitnessSampleMoments witness_sample_moments(const ProbabilityMatrix& p, std::int64_t trials, int repetitions,
                                            const RngStream& rng);

inline constexpr double kDefaultSignificanceMultiplier = 5.0;

/// Dimension hypothesis under test; the first-order error estimate only
/// exists up to its zero threshold.
struct NullHypothesis {
  Model model;
  int d;
};

struct ErrorReport {
  int k = 0;
  std::int64_t trials = 0;
  double empirical_witness = 0.0;
  double variance_per_trial = 0.0;
  double standard_error = 0.0;
  double z_score = 0.0;  // 0 when standard_error == 0
  double multiplier = kDefaultSignificanceMultiplier;
  bool null_consistent = false;
  std::optional<NullHypothesis> hypothesis;
};

/// |W| <= multiplier * sqrt(var / N) with the plug-in variance of the
/// empirical matrix. With zero standard error the test is consistent only for
/// a vanishing witness. Throws ValidationError when k exceeds the declared
/// hypothesis threshold, where the adjugate vanishes identically.
ErrorReport null_hypothesis_test(const ExperimentCounts& c,
                                 double multiplier = kDefaultSignificanceMultiplier,
                                 std::optional<NullHypothesis> hypothesis = std::nullopt);

}  // namespace nullwit
