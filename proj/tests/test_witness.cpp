#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numeric>

#include "nullwit/errors.hpp"
#include "nullwit/frames.hpp"
#include "nullwit/witness.hpp"

using namespace nullwit;

namespace {

// Minimum over deterministic encoders f: [n] -> [d] of prod_a c_a^{c_a},
// c_a = |f^{-1}(a)|. With the best decoder (uniform over each preimage) the
// largest classical diagonal product is its reciprocal.
std::uint64_t brute_force_denominator(int d, int n) {
  std::uint64_t best = UINT64_MAX;
  std::vector<int> f(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<int> c(static_cast<std::size_t>(d), 0);
    for (int a : f) ++c[static_cast<std::size_t>(a)];
    std::uint64_t prod = 1;
    for (int ca : c)
      for (int t = 0; t < ca; ++t) prod *= static_cast<std::uint64_t>(ca);
    best = std::min(best, prod);
    int i = 0;
    while (i < n && ++f[static_cast<std::size_t>(i)] == d) f[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return best;
}

// Best diagonal product of an explicit deterministic strategy, evaluated as a
// matrix product p = q r.
double deterministic_strategy_value(int d, int n, const std::vector<int>& f) {
  RMatrix r = RMatrix::Zero(d, n);
  for (int j = 0; j < n; ++j) r(f[static_cast<std::size_t>(j)], j) = 1.0;
  RMatrix q = RMatrix::Zero(n, d);
  for (int a = 0; a < d; ++a) {
    int count = 0;
    for (int i = 0; i < n; ++i) count += f[static_cast<std::size_t>(i)] == a;
    for (int i = 0; i < n; ++i)
      if (f[static_cast<std::size_t>(i)] == a) q(i, a) = 1.0 / count;
    if (count == 0) q(0, a) = 1.0;
  }
  return diagonal_product(q * r);
}

}  // namespace

TEST(WitnessFull, Examples) {
  EXPECT_DOUBLE_EQ(witness_full(RMatrix::Identity(3, 3)), 1.0);
  RMatrix p(2, 2);
  p << 0.5, 0.25, 0.5, 0.75;
  EXPECT_NEAR(witness_full(p), 0.25, 1e-15);
  EXPECT_NEAR(witness_reduced(p), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(witness_reduced(RMatrix::Identity(3, 3)), 1.0);
  EXPECT_THROW(witness_full(RMatrix::Zero(2, 3)), ValidationError);
  EXPECT_THROW(witness_reduced(RMatrix::Zero(3, 2)), ValidationError);
}

TEST(WitnessFull, QubitFiveOutcomesVanish) {
  RngStream rng(20, 0);
  for (int t = 0; t < 50; ++t) EXPECT_LT(std::abs(witness_full(random_model_matrix(Model::QuantumComplex, 2, 4, rng))), 1e-10);
}

TEST(WitnessReduced, AgreesWithFull) {
  RngStream rng(21, 0);
  for (int t = 0; t < 1000; ++t) {
    const RMatrix p = random_stochastic_matrix(5, 5, rng);
    EXPECT_LT(std::abs(witness_reduced(p) - witness_full(p)), 1e-10);
  }
}

TEST(WitnessFull, RowScalingMultiplies) {
  RngStream rng(22, 0);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 5;
    RMatrix p = random_stochastic_matrix(n, n, rng);
    const double w = witness_full(p);
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
      const double m = 0.1 + rng.uniform();
      p.row(i) *= m;
      prod *= m;
    }
    EXPECT_NEAR(witness_full(p), w * prod, 1e-12 * std::max(1.0, std::abs(w * prod)));
  }
}

TEST(WitnessFull, BoundedByOneOnStochastic) {
  RngStream rng(23, 0);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 7;
    EXPECT_LE(std::abs(witness_full(random_stochastic_matrix(n, n, rng))), 1.0 + 1e-9);
  }
}

TEST(TheoremBound, Values) {
  EXPECT_EQ(theorem_bound(4, 3), 1.0);
  EXPECT_NEAR(theorem_bound(2, 3), 1.0 / 27, 1e-16);
  EXPECT_NEAR(theorem_bound(3, 4), 0.0625, 1e-16);
  EXPECT_NEAR(theorem_bound(3, 5), 32.0 / 3125, 1e-16);
  EXPECT_EQ(theorem_bound(1, 3), 0.0);
  EXPECT_THROW(theorem_bound(0, 3), ValidationError);
}

TEST(ProductBound, Values) {
  EXPECT_EQ(product_bound(2, 2), 1.0);
  EXPECT_NEAR(product_bound(2, 4), 1.0 / 16, 1e-16);
  EXPECT_NEAR(product_bound(3, 6), 1.0 / 64, 1e-16);
  EXPECT_EQ(product_bound(5, 3), 1.0);
}

TEST(ClassicalProductBound, Values) {
  EXPECT_NEAR(classical_product_bound(2, 4), 1.0 / 16, 1e-16);
  EXPECT_NEAR(classical_product_bound(2, 3), 0.25, 1e-16);
  EXPECT_NEAR(classical_product_bound(3, 5), 1.0 / 16, 1e-16);
  EXPECT_EQ(classical_product_bound(3, 3), 1.0);
  EXPECT_THROW(classical_product_bound(3, 2), ValidationError);
}

TEST(ClassicalProductBound, MatchesBruteForceExactly) {
  for (int d = 1; d <= 3; ++d) {
    for (int n = d; n <= 6; ++n) {
      const std::uint64_t den = brute_force_denominator(d, n);
      EXPECT_EQ(classical_product_bound(d, n), 1.0 / static_cast<double>(den)) << d << " " << n;
      EXPECT_LE(classical_product_bound(d, n), product_bound(d, n) + 1e-15);
    }
  }
}

TEST(ClassicalProductBound, AttainedByExplicitStrategy) {
  // Balanced encoder: preparation j goes to register j mod d.
  for (int d = 1; d <= 3; ++d) {
    for (int n = d; n <= 6; ++n) {
      std::vector<int> f(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) f[static_cast<std::size_t>(j)] = j % d;
      EXPECT_NEAR(deterministic_strategy_value(d, n, f), classical_product_bound(d, n), 1e-15);
    }
  }
}

TEST(ClassicalProductBound, CoincidesWithProductBoundOnMultiples) {
  for (int d = 1; d <= 4; ++d)
    for (int q = 1; q <= 3; ++q) EXPECT_NEAR(classical_product_bound(d, q * d), product_bound(d, q * d), 1e-15);
}

TEST(DiagonalProduct, Values) {
  EXPECT_EQ(diagonal_product(RMatrix::Identity(4, 4)), 1.0);
  EXPECT_NEAR(diagonal_product(RMatrix::Constant(5, 5, 0.2)), std::pow(5.0, -5), 1e-18);
  const auto ex = saturating_diagonal_example(2, 4);
  EXPECT_NEAR(diagonal_product(probability_matrix(ex.first, ex.second).matrix()), 1.0 / 16, 1e-12);
}

TEST(ZeroThreshold, Values) {
  EXPECT_EQ(zero_threshold(Model::Classical, 3), 3);
  EXPECT_EQ(zero_threshold(Model::QuantumReal, 3), 6);
  EXPECT_EQ(zero_threshold(Model::QuantumComplex, 3), 9);
  EXPECT_EQ(zero_threshold(Model::QuantumComplex, 1), 1);
}

TEST(CertifiedMinDimension, Examples) {
  EXPECT_EQ(certified_min_dimension(0.2, 4), (CertifiedDims{5, 3, 3}));
  EXPECT_EQ(certified_min_dimension(1e-15, 4, 1e-9), (CertifiedDims{0, 0, 0}));
  EXPECT_EQ(certified_min_dimension(0.01, 9), (CertifiedDims{10, 4, 4}));
  EXPECT_EQ(certified_min_dimension(-0.2, 3), (CertifiedDims{4, 3, 2}));
}

TEST(CertifiedMinDimension, InvertsThreshold) {
  for (int k = 1; k <= 40; ++k) {
    const CertifiedDims c = certified_min_dimension(0.5, k);
    for (Model m : {Model::Classical, Model::QuantumReal, Model::QuantumComplex}) {
      EXPECT_GT(zero_threshold(m, c[m]), k);
      if (c[m] > 1) { EXPECT_LE(zero_threshold(m, c[m] - 1), k); }
    }
  }
}

TEST(WitnessReport, Fields) {
  const WitnessReport r = make_witness_report(RMatrix::Identity(3, 3));
  EXPECT_EQ(r.k, 2);
  EXPECT_EQ(r.value_full, 1.0);
  EXPECT_EQ(r.certified_min_dim.classical, 3);
  EXPECT_EQ(r.theorem_bound.size(), 3u);
  EXPECT_EQ(r.theorem_bound.at(3), 1.0);
  EXPECT_EQ(r.tolerance_used, kDefaultNullTolerance);

  const Frame f = tetrahedron_frame();
  const WitnessReport t = make_witness_report(probability_matrix(frame_ensemble(f), frame_povm(f)).matrix());
  EXPECT_NEAR(t.value_full, 1.0 / 27, 1e-12);
  EXPECT_EQ(t.certified_min_dim, (CertifiedDims{4, 3, 2}));
}

TEST(NullThresholds, VanishAtThreshold) {
  RngStream rng(24, 0);
  for (Model m : {Model::Classical, Model::QuantumReal, Model::QuantumComplex}) {
    for (int d : {2, 3}) {
      const int k = zero_threshold(m, d);
      for (int t = 0; t < 200; ++t) EXPECT_LT(std::abs(witness_full(random_model_matrix(m, d, k, rng))), 1e-9);
    }
  }
}

TEST(NullThresholds, RandomInstancesAreStochastic) {
  RngStream rng(25, 0);
  for (Model m : {Model::Classical, Model::QuantumReal, Model::QuantumComplex}) {
    const RMatrix p = random_model_matrix(m, 3, 4, rng);
    EXPECT_EQ(p.rows(), 5);
    EXPECT_LT(column_sum_deviation(p).max_deviation, 1e-10);
    EXPECT_GE(p.minCoeff(), -1e-12);
  }
}

TEST(TheoremBound, RespectedByRandomInstances) {
  RngStream rng(26, 0);
  const Model models[] = {Model::Classical, Model::QuantumReal, Model::QuantumComplex};
  for (int t = 0; t < 2000; ++t) {
    const int d = 2 + t % 4;
    const int k = d + (t / 4) % (7 - d);
    const Model m = models[t % 3];
    EXPECT_LE(std::abs(witness_full(random_model_matrix(m, d, k, rng))), theorem_bound(d, k) + 1e-9);
  }
}

TEST(ModelTag, Roundtrip) {
  for (Model m : {Model::Classical, Model::QuantumReal, Model::QuantumComplex})
    EXPECT_EQ(model_from_string(to_string(m)), m);
  EXPECT_THROW(model_from_string("octonion"), ValidationError);
}
