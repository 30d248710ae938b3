#include "nullwit/stats.hpp"

#include <cmath>
#include <sstream>

#include "nullwit/errors.hpp"

namespace nullwit {

ExperimentCounts::ExperimentCounts(CountMatrix counts, std::int64_t trials)
    : counts_(std::move(counts)), trials_(trials) {
  if (trials_ < 1) throw ValidationError("ExperimentCounts: trials must be >= 1");
  if (counts_.size() == 0) throw ValidationError("ExperimentCounts: empty count matrix");
  if (counts_.minCoeff() < 0) throw ValidationError("ExperimentCounts: negative count");
  for (Eigen::Index j = 0; j < counts_.cols(); ++j) {
    if (counts_.col(j).sum() != trials_) {
      std::ostringstream os;
      os << "ExperimentCounts: column " << j << " sums to " << counts_.col(j).sum() << ", expected " << trials_;
      throw ValidationError(os.str());
    }
  }
}

RMatrix adjugate(const RMatrix& p) {
  if (p.rows() != p.cols() || p.rows() == 0) throw ValidationError("adjugate: matrix must be square");
  const Eigen::Index n = p.rows();
  if (n == 1) return RMatrix::Ones(1, 1);
  RMatrix adj(n, n);
  RMatrix minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = p(r, c);
        }
        ++mr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * Eigen::PartialPivLU<RMatrix>(minor).determinant();
    }
  }
  return adj;
}

double first_order_shift(const RMatrix& p, const RMatrix& dp) {
  if (p.rows() != dp.rows() || p.cols() != dp.cols()) throw ValidationError("first_order_shift: shape mismatch");
  return (dp * adjugate(p)).trace();
}

VarianceForms witness_variance_forms(const RMatrix& p) {
  const RMatrix a = adjugate(p);
  const Eigen::Index n = p.rows();
  VarianceForms v;
  for (Eigen::Index j = 0; j < n; ++j) {
    double abar = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) abar += p(i, j) * a(j, i);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dev = a(j, i) - abar;
      v.centered += p(i, j) * dev * dev;
      v.expanded += p(i, j) * (a(j, i) * a(j, i) - abar * abar);
    }
  }
  return v;
}

ExperimentCounts sample_counts(const ProbabilityMatrix& p, std::int64_t trials, RngStream& rng) {
  if (trials < 1) throw ValidationError("sample_counts: trials must be >= 1");
  const int n = p.rows();
  const int m = p.cols();
  CountMatrix counts = CountMatrix::Zero(n, m);
  for (int j = 0; j < m; ++j) {
    std::int64_t remaining = trials;
    double mass = 1.0;
    for (int i = 0; i < n - 1 && remaining > 0; ++i) {
      const double q = mass > 0.0 ? std::clamp(p(i, j) / mass, 0.0, 1.0) : 0.0;
      const std::int64_t x = rng.binomial(remaining, q);
      counts(i, j) = x;
      remaining -= x;
      mass -= p(i, j);
    }
    counts(n - 1, j) += remaining;
  }
  return ExperimentCounts(std::move(counts), trials);
}

ProbabilityMatrix empirical_probability(const ExperimentCounts& c) {
  RMatrix p = c.counts().cast<double>() / static_cast<double>(c.trials());
  return ProbabilityMatrix(std::move(p));
}

WitnessSampleMoments witness_sample_moments(const ProbabilityMatrix& p, std::int64_t trials, int repetitions,
                                            const RngStream& rng) {
  if (repetitions < 2) throw ValidationError("monte_carlo_variance: need at least two repetitions");
  std::vector<double> w(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    RngStream local = rng.derive(static_cast<std::uint64_t>(r));
    w[static_cast<std::size_t>(r)] = witness_full(empirical_probability(sample_counts(p, trials, local)));
  }
  double mean = 0.0;
  for (double x : w) mean += x;
  mean /= repetitions;
  double ss = 0.0;
  for (double x : w) ss += (x - mean) * (x - mean);
  return {mean, ss / (repetitions - 1)};
}

double monte_carlo_variance(const ProbabilityMatrix& p, std::int64_t trials, int repetitions, const RngStream& rng) {
  return static_cast<double>(trials) * witness_sample_moments(p, trials, repetitions, rng).variance;
}

ErrorReport null_hypothesis_test(const ExperimentCounts& c, double multiplier,
                                 std::optional<NullHypothesis> hypothesis) {
  if (c.rows() != c.cols()) throw ValidationError("null_hypothesis_test: count matrix must be square");
  if (!(multiplier > 0.0)) throw ValidationError("null_hypothesis_test: multiplier must be positive");
  ErrorReport r;
  r.k = c.rows() - 1;
  r.trials = c.trials();
  r.multiplier = multiplier;
  r.hypothesis = hypothesis;
  if (hypothesis) {
    const int threshold = zero_threshold(hypothesis->model, hypothesis->d);
    if (r.k > threshold) {
      std::ostringstream os;
      os << "null_hypothesis_test: k = " << r.k << " exceeds the zero threshold " << threshold << " of "
         << to_string(hypothesis->model) << " d = " << hypothesis->d
         << "; the adjugate vanishes there and the error estimate needs second-order minors";
      throw ValidationError(os.str());
    }
  }
  const ProbabilityMatrix pbar = empirical_probability(c);
  r.empirical_witness = witness_full(pbar);
  r.variance_per_trial = std::max(0.0, witness_variance(pbar));
  r.standard_error = std::sqrt(r.variance_per_trial / static_cast<double>(r.trials));
  if (r.standard_error > 0.0) {
    r.z_score = r.empirical_witness / r.standard_error;
    r.null_consistent = std::abs(r.empirical_witness) <= multiplier * r.standard_error;
  } else {
    r.z_score = 0.0;
    r.null_consistent = std::abs(r.empirical_witness) <= 1e-12;
  }
  return r;
}

}  // namespace nullwit
