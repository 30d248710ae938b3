#include <gtest/gtest.h>

#include <cmath>

#include "nullwit/errors.hpp"
#include "nullwit/frames.hpp"
#include "nullwit/qcore.hpp"

using namespace nullwit;
using namespace std::complex_literals;

namespace {

MeasurementOperator real_op(const RMatrix& m) { return MeasurementOperator(m.cast<Complex>(), Field::Real); }

CVector cvec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (Complex x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST(StateVector, RejectsUnnormalizedAndImaginaryReal) {
  EXPECT_THROW(StateVector(cvec({1.0, 1.0}), Field::Complex), ValidationError);
  EXPECT_THROW(StateVector(cvec({1.0i, 0.0}), Field::Real), ValidationError);
  EXPECT_NO_THROW(StateVector(cvec({1.0i, 0.0}), Field::Complex));
  EXPECT_THROW(StateVector::normalized(CVector::Zero(2), Field::Real), ValidationError);
}

TEST(DensityFromVector, BasisProjector) {
  const auto rho = density_from_vector(StateVector(cvec({1.0, 0.0}), Field::Real));
  EXPECT_NEAR((rho.matrix() - (CMatrix(2, 2) << 1, 0, 0, 0).finished()).norm(), 0.0, 1e-15);
}

TEST(DensityFromVector, EqualSuperposition) {
  const auto rho = density_from_vector(StateVector::normalized(cvec({1.0, 1.0}), Field::Real));
  EXPECT_NEAR((rho.matrix() - CMatrix::Constant(2, 2, 0.5)).norm(), 0.0, 1e-15);
}

TEST(DensityFromVector, ComplexPhase) {
  const auto rho = density_from_vector(StateVector::normalized(cvec({1.0, 1.0i}), Field::Complex));
  CMatrix expected(2, 2);
  expected << 0.5, -0.5i, 0.5i, 0.5;
  EXPECT_NEAR((rho.matrix() - expected).norm(), 0.0, 1e-15);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-15);
}

TEST(DensityOperator, Validation) {
  CMatrix bad_trace = CMatrix::Identity(2, 2);
  EXPECT_THROW(DensityOperator(bad_trace, Field::Real), ValidationError);
  CMatrix non_herm(2, 2);
  non_herm << 0.5, 0.1, 0.0, 0.5;
  EXPECT_THROW(DensityOperator(non_herm, Field::Real), ValidationError);
  CMatrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  EXPECT_THROW(DensityOperator(negative, Field::Real), ValidationError);
}

TEST(ValidatePovm, Examples) {
  std::vector<MeasurementOperator> halves{real_op(RMatrix::Identity(2, 2) / 2), real_op(RMatrix::Identity(2, 2) / 2)};
  EXPECT_TRUE(validate_povm(halves, 1e-10).passed);
  std::vector<MeasurementOperator> single{real_op(RMatrix::Identity(3, 3))};
  EXPECT_TRUE(validate_povm(single, 1e-10).passed);
  std::vector<MeasurementOperator> over{real_op(0.6 * RMatrix::Identity(2, 2)), real_op(0.6 * RMatrix::Identity(2, 2))};
  const PovmReport r = validate_povm(over, 1e-10);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.completeness_deviation, 0.2, 1e-14);
  EXPECT_THROW(Povm(std::move(over)), ValidationError);
}

TEST(ProbabilityMatrix, OrthogonalProjectorsGiveIdentity) {
  std::vector<StateVector> s{StateVector(cvec({1.0, 0.0}), Field::Real), StateVector(cvec({0.0, 1.0}), Field::Real)};
  RMatrix e1 = RMatrix::Zero(2, 2), e2 = RMatrix::Zero(2, 2);
  e1(0, 0) = 1;
  e2(1, 1) = 1;
  const Povm povm({real_op(e1), real_op(e2)});
  const auto p = probability_matrix(PreparationEnsemble::from_pure(s), povm);
  EXPECT_NEAR((p.matrix() - RMatrix::Identity(2, 2)).norm(), 0.0, 1e-15);

  std::vector<DensityOperator> mixed{DensityOperator(CMatrix::Identity(2, 2) / 2.0, Field::Real),
                                     DensityOperator(CMatrix::Identity(2, 2) / 2.0, Field::Real)};
  const auto q = probability_matrix(PreparationEnsemble(std::move(mixed)), povm);
  EXPECT_NEAR((q.matrix() - RMatrix::Constant(2, 2, 0.5)).norm(), 0.0, 1e-15);
}

TEST(ProbabilityMatrix, TetrahedronEntries) {
  const Frame f = tetrahedron_frame();
  const auto p = probability_matrix(frame_ensemble(f), frame_povm(f));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(p(i, j), i == j ? 0.5 : 1.0 / 6.0, 1e-14);
}

TEST(ProbabilityMatrix, DimensionMismatchAndValidation) {
  RngStream rng(1, 0);
  const Povm povm = random_povm(3, 3, 1, Field::Real, rng);
  std::vector<StateVector> s{random_pure_state(2, Field::Real, rng)};
  EXPECT_THROW(probability_matrix(PreparationEnsemble::from_pure(s), povm), ValidationError);
  RMatrix bad(2, 2);
  bad << 0.5, 0.5, 0.6, 0.5;
  EXPECT_THROW(ProbabilityMatrix{bad}, ValidationError);
  RMatrix neg(2, 2);
  neg << 1.1, 0.5, -0.1, 0.5;
  EXPECT_THROW(ProbabilityMatrix{neg}, ValidationError);
}

TEST(ProbabilityMatrix, ColumnStochasticAndLinear) {
  RngStream rng(9, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 4;
    const Field field = trial % 2 ? Field::Complex : Field::Real;
    std::vector<StateVector> states;
    for (int j = 0; j < 4; ++j) states.push_back(random_pure_state(d, field, rng));
    const auto ens = PreparationEnsemble::from_pure(states);
    const Povm a = random_povm(d, 3, 1, field, rng);
    const Povm b = random_povm(d, 3, 1, field, rng);
    const auto pa = probability_matrix(ens, a).matrix();
    const auto pb = probability_matrix(ens, b).matrix();
    EXPECT_LT(column_sum_deviation(pa).max_deviation, 1e-10);
    const double alpha = rng.uniform();
    std::vector<MeasurementOperator> mix;
    for (int i = 0; i < 3; ++i)
      mix.emplace_back(alpha * a[i].matrix() + (1 - alpha) * b[i].matrix(), field);
    const auto pm = probability_matrix(ens, Povm(std::move(mix))).matrix();
    EXPECT_LT((pm - (alpha * pa + (1 - alpha) * pb)).cwiseAbs().maxCoeff(), 1e-12);

    // Linearity in the state: a convex mixture of two preparations.
    std::vector<DensityOperator> rhos;
    rhos.emplace_back(alpha * ens[0].matrix() + (1 - alpha) * ens[1].matrix(), field);
    const auto pr = probability_matrix(PreparationEnsemble(std::move(rhos)), a).matrix();
    EXPECT_LT((pr.col(0) - (alpha * pa.col(0) + (1 - alpha) * pa.col(1))).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(RandomPureState, NormalizationAndDeterminism) {
  RngStream a(5, 1), b(5, 1);
  for (int d = 1; d <= 6; ++d) {
    for (Field f : {Field::Real, Field::Complex}) {
      const auto v = random_pure_state(d, f, a);
      const auto w = random_pure_state(d, f, b);
      EXPECT_NEAR(v.components().norm(), 1.0, 1e-12);
      EXPECT_EQ(v.components(), w.components());
      if (f == Field::Real) {
        EXPECT_EQ(v.components().imag().cwiseAbs().maxCoeff(), 0.0);
      }
    }
  }
  RngStream c(6, 0);
  const auto one = random_pure_state(1, Field::Real, c);
  EXPECT_NEAR(std::abs(one.components()(0).real()), 1.0, 1e-15);
}

TEST(RandomPureState, RotationInvariantSecondMoment) {
  // E|psi><psi| = 1/d for a unitarily invariant distribution.
  RngStream rng(8, 0);
  const int d = 3, n = 20000;
  CMatrix acc = CMatrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const auto v = random_pure_state(d, Field::Complex, rng);
    acc += v.components() * v.components().adjoint();
  }
  acc /= n;
  EXPECT_LT((acc - CMatrix::Identity(d, d) / 3.0).cwiseAbs().maxCoeff(), 0.01);
}

TEST(HaarUnitary, IsUnitaryAndRealWhenRequested) {
  RngStream rng(10, 0);
  for (int d = 1; d <= 6; ++d) {
    const CMatrix u = haar_unitary(d, Field::Complex, rng);
    EXPECT_LT((u.adjoint() * u - CMatrix::Identity(d, d)).norm(), 1e-12);
    const CMatrix o = haar_unitary(d, Field::Real, rng);
    EXPECT_LT((o.adjoint() * o - CMatrix::Identity(d, d)).norm(), 1e-12);
    EXPECT_EQ(o.imag().cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(CascadePovm, FullTransferAtRightAngle) {
  std::vector<std::vector<double>> angles{{std::acos(-1.0) / 2}};
  const Povm p = cascade_povm(2, 1, Field::Real, angles, {});
  ASSERT_EQ(p.size(), 2);
  CMatrix e1 = CMatrix::Zero(2, 2), e2 = CMatrix::Zero(2, 2);
  e1(0, 0) = 1;
  e2(1, 1) = 1;
  EXPECT_LT((p[0].matrix() - e1).norm(), 1e-15);
  EXPECT_LT((p[1].matrix() - e2).norm(), 1e-15);
}

TEST(CascadePovm, ZeroAnglesLeaveIdentityInRemainder) {
  std::vector<std::vector<double>> angles{{0.0}, {0.0}};
  std::vector<CMatrix> rot{CMatrix::Identity(3, 3)};
  const Povm p = cascade_povm(3, 1, Field::Complex, angles, rot);
  EXPECT_LT(p[0].matrix().norm(), 1e-15);
  EXPECT_LT((p[2].matrix() - CMatrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(RandomPovm, AlwaysValid) {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + trial % 5;
    const int n = 2 + (trial / 5) % 6;
    const Field f = trial % 2 ? Field::Complex : Field::Real;
    const int rank = 1 + static_cast<int>(rng.uniform() * (d / 2));
    const Povm p = random_povm(d, n, rank, f, rng);
    std::vector<MeasurementOperator> elems = p.elements();
    EXPECT_TRUE(validate_povm(elems, 1e-10).passed);
    EXPECT_EQ(p.size(), n);
  }
}

TEST(RandomPovm, RankBound) {
  RngStream rng(12, 0);
  const Povm p = random_povm(4, 5, 2, Field::Complex, rng);
  for (int i = 0; i < 4; ++i) {
    const RVector ev = hermitian_eigenvalues(p[i].matrix());
    EXPECT_LE((ev.array() > 1e-10).count(), 2);
  }
}

TEST(RandomPovm, RankOutOfRange) {
  RngStream rng(13, 0);
  EXPECT_THROW(random_povm(4, 3, 3, Field::Real, rng), ValidationError);
  EXPECT_THROW(random_povm(3, 3, 0, Field::Real, rng), ValidationError);
  EXPECT_THROW(random_povm(3, 1, 1, Field::Real, rng), ValidationError);
  EXPECT_NO_THROW(random_povm(1, 3, 1, Field::Real, rng));
}

TEST(OrthonormalCompletion, SingleRow) {
  CMatrix rows(1, 3);
  rows << 1, 0, 0;
  const CMatrix c = orthonormal_completion(rows);
  ASSERT_EQ(c.rows(), 2);
  CMatrix all(3, 3);
  all << rows, c;
  EXPECT_LT((all * all.adjoint() - CMatrix::Identity(3, 3)).norm(), 1e-10);
}

TEST(OrthonormalCompletion, FullBasisAndErrors) {
  EXPECT_EQ(orthonormal_completion(CMatrix::Identity(4, 4)).rows(), 0);
  CMatrix bad(2, 3);
  bad << 1, 0, 0, 1, 1, 0;
  EXPECT_THROW(orthonormal_completion(bad), ValidationError);
}

TEST(OrthonormalCompletion, RandomSubspaces) {
  RngStream rng(14, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    const int m = 1 + trial % n;
    const Field f = trial % 2 ? Field::Complex : Field::Real;
    const CMatrix u = haar_unitary(n, f, rng);
    const CMatrix rows = u.topRows(m);
    const CMatrix c = orthonormal_completion(rows);
    ASSERT_EQ(c.rows(), n - m);
    CMatrix all(n, n);
    all << rows, c;
    EXPECT_LT((all * all.adjoint() - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    if (f == Field::Real && c.size() > 0) {
      EXPECT_EQ(c.imag().cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(OrthonormalCompletion, TetrahedronRowsToDual) {
  const Frame f = tetrahedron_frame();
  const CMatrix rows = f.coefficients() * std::sqrt(2.0 / 4.0);
  EXPECT_EQ(orthonormal_completion(rows).rows(), 2);
  EXPECT_TRUE(verify_etf(dual_frame(f)).passed());
}

TEST(FieldTag, Roundtrip) {
  EXPECT_EQ(field_from_string(to_string(Field::Real)), Field::Real);
  EXPECT_EQ(field_from_string(to_string(Field::Complex)), Field::Complex);
  EXPECT_THROW(field_from_string("quaternion"), ValidationError);
}
