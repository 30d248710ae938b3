#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nullwit/errors.hpp"
#include "nullwit/frames.hpp"
#include "nullwit/witness.hpp"

using namespace nullwit;

namespace {

double frame_witness(const Frame& f) { return witness_full(probability_matrix(frame_ensemble(f), frame_povm(f))); }

void expect_overlaps(const Frame& f, double target) {
  const CMatrix g = f.gram();
  for (int i = 0; i < f.size(); ++i)
    for (int j = 0; j < f.size(); ++j)
      if (i != j) { EXPECT_NEAR(std::norm(g(i, j)), target, 1e-12); }
}

std::vector<Frame> all_qr_frames(std::vector<int> primes) {
  std::vector<Frame> out;
  for (int p : primes) {
    if ((p + 1) % 4 == 0) {
      out.push_back(quadratic_residue_frame(p, QrVariant::Upper));
      out.push_back(quadratic_residue_frame(p, QrVariant::Lower));
    }
    out.push_back(quadratic_residue_frame(p, QrVariant::Extended));
  }
  return out;
}

}  // namespace

TEST(Simplex, TwoDimensionalOverlaps) {
  const Frame f = simplex_frame(2);
  EXPECT_EQ(f.size(), 3);
  expect_overlaps(f, 0.25);
  EXPECT_EQ(f.field(), Field::Real);
}

TEST(Simplex, AllDimensionsAreTightEquiangular) {
  for (int d = 1; d <= 10; ++d) {
    const Frame f = simplex_frame(d);
    const FrameReport r = verify_etf(f, 1e-10);
    EXPECT_TRUE(r.passed()) << d;
    if (d > 1) { EXPECT_NEAR(r.overlap_target, 1.0 / (d * d), 1e-15); }
    EXPECT_NEAR(frame_witness(f), theorem_bound(d, d), 1e-9) << d;
  }
}

TEST(Simplex, OneDimensionalDegenerate) {
  const Frame f = simplex_frame(1);
  EXPECT_EQ(f.size(), 2);
  EXPECT_EQ(f.dim(), 1);
  EXPECT_NEAR(std::abs(f.vectors()[0].components()(0)), 1.0, 1e-15);
}

TEST(Tetrahedron, OverlapsFrameOperatorAndWitness) {
  const Frame f = tetrahedron_frame();
  expect_overlaps(f, 1.0 / 3);
  EXPECT_LT((f.frame_operator() - 2.0 * CMatrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_NEAR(frame_witness(f), 1.0 / 27, 1e-12);
  const Povm povm = frame_povm(f);
  for (const auto& m : povm.elements()) EXPECT_NEAR(m.trace(), 0.5, 1e-14);
}

TEST(Icosahedron, OverlapsAndWitness) {
  const Frame f = icosahedron_frame();
  EXPECT_EQ(f.dim(), 3);
  EXPECT_EQ(f.size(), 6);
  expect_overlaps(f, 0.2);
  const FrameReport r = verify_etf(f, 1e-10);
  EXPECT_TRUE(r.passed());
  EXPECT_LT(r.max_frame_deviation, 1e-12);
  EXPECT_LT(r.max_overlap_deviation, 1e-12);
  const Povm povm = frame_povm(f);
  for (const auto& m : povm.elements()) EXPECT_NEAR(m.trace(), 0.5, 1e-14);
  EXPECT_NEAR(frame_witness(f), 0.01024, 1e-12);
}

TEST(Icosahedron, SignFlipStillPasses) {
  const Frame f = icosahedron_frame();
  std::vector<StateVector> v = f.vectors();
  v[2] = StateVector(-v[2].components(), Field::Real);
  EXPECT_TRUE(verify_etf(Frame(Field::Real, v)).passed());
}

TEST(VerifyEtf, RandomVectorsFail) {
  RngStream rng(30, 0);
  std::vector<StateVector> v;
  for (int i = 0; i < 5; ++i) v.push_back(random_pure_state(3, Field::Complex, rng));
  EXPECT_FALSE(verify_etf(Frame(Field::Complex, v)).passed());
}

TEST(QuadraticResidue, Examples) {
  const Frame lower7 = quadratic_residue_frame(7, QrVariant::Lower);
  EXPECT_EQ(lower7.dim(), 3);
  EXPECT_EQ(lower7.size(), 7);
  expect_overlaps(lower7, 2.0 / 9);
  const Frame upper7 = quadratic_residue_frame(7, QrVariant::Upper);
  EXPECT_EQ(upper7.dim(), 4);
  expect_overlaps(upper7, 1.0 / 8);
  const Frame ext5 = quadratic_residue_frame(5, QrVariant::Extended);
  EXPECT_EQ(ext5.dim(), 3);
  EXPECT_EQ(ext5.size(), 6);
  EXPECT_TRUE(verify_etf(ext5).passed());
  EXPECT_LT((gram_spectrum(ext5) - gram_spectrum(icosahedron_frame())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(QuadraticResidue, AllVariantsPassAndSaturate) {
  for (const Frame& f : all_qr_frames({3, 5, 7, 11, 13, 19, 23})) {
    EXPECT_TRUE(verify_etf(f, 1e-10).passed()) << f.dim() << " " << f.size();
    EXPECT_NEAR(frame_witness(f), theorem_bound(f.dim(), f.k()), 1e-9) << f.dim() << " " << f.size();
  }
}

TEST(QuadraticResidue, Errors) {
  EXPECT_THROW(quadratic_residue_frame(9, QrVariant::Extended), ValidationError);
  EXPECT_THROW(quadratic_residue_frame(5, QrVariant::Upper), ValidationError);
  EXPECT_THROW(quadratic_residue_frame(13, QrVariant::Lower), ValidationError);
  EXPECT_THROW(quadratic_residue_frame(2, QrVariant::Extended), ValidationError);
}

TEST(GaussSum, FullSumHasModulusSqrtP) {
  for (int p : {3, 5, 7, 11, 13}) {
    for (int j = 1; j < p; ++j) EXPECT_NEAR(std::abs(quadratic_gauss_sum(p, j, 0, p - 1)), std::sqrt(p), 1e-10);
  }
}

TEST(GaussSum, HalfSumRelation) {
  // Squares a^2 for a = 1..(p-1)/2 run once over the residues, so
  // 2 H - 1 = G with H the half sum from a = 0 and G the full sum.
  for (int p : {3, 5, 7, 11, 13}) {
    for (int j = 1; j < p; ++j) {
      const Complex h = quadratic_gauss_sum(p, j, 0, (p - 1) / 2);
      const Complex g = quadratic_gauss_sum(p, j, 0, p - 1);
      EXPECT_NEAR(std::abs(2.0 * h - 1.0 - g), 0.0, 1e-10);
      if (p % 4 == 3) { EXPECT_NEAR(std::norm(h), (p + 1) / 4.0, 1e-10); }
    }
  }
}

TEST(IsPrime, Basics) {
  EXPECT_FALSE(is_prime(1));
  EXPECT_TRUE(is_prime(2));
  EXPECT_TRUE(is_prime(23));
  EXPECT_FALSE(is_prime(21));
}

TEST(Dual, ExamplesAndErrors) {
  const Frame dt = dual_frame(tetrahedron_frame());
  EXPECT_EQ(dt.dim(), 2);
  EXPECT_EQ(dt.size(), 4);
  EXPECT_TRUE(verify_etf(dt).passed());
  const Frame ds = dual_frame(simplex_frame(3));
  EXPECT_EQ(ds.dim(), 1);
  EXPECT_EQ(ds.size(), 4);
  for (const auto& v : ds.vectors()) EXPECT_NEAR(std::abs(v.components()(0)), 1.0, 1e-12);
  const Frame dq = dual_frame(quadratic_residue_frame(7, QrVariant::Lower));
  EXPECT_EQ(dq.dim(), 4);
  expect_overlaps(dq, 1.0 / 8);

  RngStream rng(31, 0);
  std::vector<StateVector> v;
  for (int i = 0; i < 4; ++i) v.push_back(random_pure_state(2, Field::Real, rng));
  EXPECT_THROW(dual_frame(Frame(Field::Real, v)), ValidationError);
  std::vector<StateVector> basis;
  for (int i = 0; i < 3; ++i) {
    CVector e = CVector::Zero(3);
    e(i) = 1;
    basis.emplace_back(e, Field::Real);
  }
  EXPECT_THROW(dual_frame(Frame(Field::Real, basis)), ValidationError);
}

TEST(Dual, InvolutionOnParametersAndSpectrum) {
  std::vector<Frame> frames = all_qr_frames({3, 5, 7, 11});
  frames.push_back(tetrahedron_frame());
  frames.push_back(icosahedron_frame());
  for (int d = 2; d <= 6; ++d) frames.push_back(simplex_frame(d));
  for (const Frame& f : frames) {
    const Frame g = dual_frame(f);
    EXPECT_EQ(g.dim(), f.size() - f.dim());
    EXPECT_EQ(g.size(), f.size());
    EXPECT_TRUE(verify_etf(g).passed());
    EXPECT_NEAR(frame_witness(g), theorem_bound(g.dim(), g.k()), 1e-9);
    if (g.dim() == g.size()) continue;
    const Frame h = dual_frame(g);
    EXPECT_EQ(h.dim(), f.dim());
    EXPECT_LT((gram_spectrum(h) - gram_spectrum(f)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(FramePovm, SimplexElementsAndErrors) {
  const Povm p = frame_povm(simplex_frame(2));
  EXPECT_EQ(p.size(), 3);
  CMatrix sum = CMatrix::Zero(2, 2);
  for (const auto& m : p.elements()) {
    EXPECT_NEAR(m.trace(), 2.0 / 3, 1e-14);
    sum += m.matrix();
  }
  EXPECT_LT((sum - CMatrix::Identity(2, 2)).norm(), 1e-14);
  RngStream rng(32, 0);
  std::vector<StateVector> v;
  for (int i = 0; i < 3; ++i) v.push_back(random_pure_state(2, Field::Real, rng));
  EXPECT_THROW(frame_povm(Frame(Field::Real, v)), ValidationError);
}

TEST(SaturatingDiagonal, AttainsProductBound) {
  for (int n = 1; n <= 7; ++n) {
    for (int d = 1; d <= n; ++d) {
      const auto ex = saturating_diagonal_example(d, n);
      EXPECT_EQ(ex.first.size(), n);
      EXPECT_EQ(ex.second.size(), n);
      EXPECT_EQ(ex.first.dim(), d);
      const RMatrix p = probability_matrix(ex.first, ex.second).matrix();
      EXPECT_NEAR(diagonal_product(p), std::pow(static_cast<double>(d) / n, n), 1e-12) << d << " " << n;
    }
  }
  const auto ex = saturating_diagonal_example(3, 5);
  EXPECT_NEAR(diagonal_product(probability_matrix(ex.first, ex.second).matrix()), 0.07776, 1e-12);
  EXPECT_THROW(saturating_diagonal_example(4, 3), ValidationError);
}

TEST(Appendix, ExpectedValues) {
  const struct {
    CaseId id;
    double value, tol;
  } cases[] = {{CaseId::D3K4Real, 0.052734375, 1e-12},
               {CaseId::D4K5Real, 0.07259941597561233, 1e-12},
               {CaseId::D3K4Complex, 0.0585806, 1e-6},
               {CaseId::D4K5Complex, 0.074847, 1e-5}};
  for (const auto& c : cases) {
    const OptimumCase oc = appendix_optimum(c.id);
    const double w = witness_full(probability_matrix(oc.ensemble, oc.povm));
    EXPECT_NEAR(w, c.value, c.tol) << to_string(c.id);
    EXPECT_NEAR(w, oc.expected_value, 1e-6);
    EXPECT_LE(w, oc.theorem_gap_bound);
    EXPECT_EQ(case_id_from_string(to_string(c.id)), c.id);
  }
  EXPECT_NEAR(appendix_optimum(CaseId::D3K4Real).theorem_gap_bound, 0.0625, 1e-15);
  EXPECT_NEAR(appendix_optimum(CaseId::D4K5Real).theorem_gap_bound, 0.07776, 1e-15);
  EXPECT_THROW(case_id_from_string("d5k6_real"), UnknownCaseError);
  EXPECT_EQ(appendix_optimum(CaseId::D3K4Real).ensemble.field(), Field::Real);
  EXPECT_EQ(appendix_optimum(CaseId::D4K5Complex).povm.field(), Field::Complex);
}

TEST(Appendix, D3K4ClosedFormMatchesFamily) {
  RngStream rng(33, 0);
  for (int t = 0; t < 20; ++t) {
    const double a = rng.uniform(), d = rng.uniform();
    const auto fam = d3k4_complex_family(a, d);
    EXPECT_NEAR(witness_full(probability_matrix(fam.first, fam.second)), d3k4_complex_closed_form(a, d), 1e-10);
  }
  EXPECT_THROW(d3k4_complex_family(1.5, 0.5), ValidationError);
}

TEST(Appendix, D4K5ClosedFormMatchesFamily) {
  RngStream rng(34, 0);
  for (int t = 0; t < 20; ++t) {
    RVector v(4);
    for (int i = 0; i < 4; ++i) v(i) = rng.normal();
    v.normalize();
    const double s = 2 * std::numbers::pi * rng.uniform();
    const D4K5Params q{v(0), v(1), v(2), v(3), std::cos(s), std::sin(s)};
    const auto fam = d4k5_complex_family(q);
    EXPECT_NEAR(witness_full(probability_matrix(fam.first, fam.second)), d4k5_complex_closed_form(q), 1e-10);
  }
  EXPECT_THROW(d4k5_complex_family(D4K5Params{1, 1, 0, 0, 1, 0}), ValidationError);
}

TEST(Appendix, StoredD4K5PointIsLocalMaximum) {
  const D4K5Params b = d4k5_complex_best();
  const double w0 = d4k5_complex_closed_form(b);
  EXPECT_NEAR(w0, 0.074847, 1e-6);
  RngStream rng(35, 0);
  for (int t = 0; t < 50; ++t) {
    RVector v(4);
    v << b.x, b.y, b.z, b.t;
    for (int i = 0; i < 4; ++i) v(i) += 1e-4 * rng.normal();
    v.normalize();
    const double s = std::atan2(b.b, b.a) + 1e-4 * rng.normal();
    EXPECT_LE(d4k5_complex_closed_form({v(0), v(1), v(2), v(3), std::cos(s), std::sin(s)}), w0 + 1e-12);
  }
}

TEST(Frame, Validation) {
  std::vector<StateVector> mixed{StateVector::normalized(CVector::Ones(2), Field::Real),
                                 StateVector::normalized(CVector::Ones(3), Field::Real)};
  EXPECT_THROW(Frame(Field::Real, mixed), ValidationError);
  std::vector<StateVector> cplx{StateVector::normalized(CVector::Ones(2), Field::Complex)};
  EXPECT_THROW(Frame(Field::Real, cplx), ValidationError);
  EXPECT_THROW(Frame(Field::Real, {}), ValidationError);
}
