#include "nullwit/frames.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nullwit/errors.hpp"
#include "nullwit/witness.hpp"

namespace nullwit {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt3 = std::numbers::sqrt3;

Complex root_of_unity(long long numerator, long long denominator) {
  const long long r = ((numerator % denominator) + denominator) % denominator;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(denominator);
  return {std::cos(angle), std::sin(angle)};
}

CVector basis(int d, int label) { return CVector::Unit(d, label - 1); }

StateVector real_state(const RVector& v) { return StateVector::normalized(v.cast<Complex>(), Field::Real); }

MeasurementOperator rank_one(const CVector& m, double weight, Field field) {
  CMatrix op = weight * m * m.adjoint();
  op = 0.5 * (op + op.adjoint()).eval();
  if (field == Field::Real) op = op.real().cast<Complex>();
  return MeasurementOperator(std::move(op), field);
}

}  // namespace

Frame::Frame(Field field, std::vector<StateVector> vectors) : field_(field), vectors_(std::move(vectors)) {
  if (vectors_.empty()) throw ValidationError("Frame: no vectors");
  for (const auto& v : vectors_) {
    if (v.dim() != vectors_.front().dim()) throw ValidationError("Frame: vectors differ in dimension");
    if (field_ == Field::Real && v.field() != Field::Real)
      throw ValidationError("Frame: complex vector in real frame");
  }
}

CMatrix Frame::coefficients() const {
  CMatrix c(dim(), size());
  for (int j = 0; j < size(); ++j) c.col(j) = vectors_[static_cast<std::size_t>(j)].components();
  return c;
}

CMatrix Frame::frame_operator() const {
  const CMatrix c = coefficients();
  return c * c.adjoint();
}

CMatrix Frame::gram() const {
  const CMatrix c = coefficients();
  return c.adjoint() * c;
}

FrameReport verify_etf(const Frame& f, double tolerance) {
  FrameReport r;
  const int d = f.dim();
  const int n = f.size();
  const int k = n - 1;
  const CMatrix s = f.frame_operator();
  r.max_frame_deviation =
      (s - (static_cast<double>(n) / d) * CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  r.is_tight = r.max_frame_deviation <= tolerance;
  r.overlap_target = k >= 1 ? static_cast<double>(k + 1 - d) / (static_cast<double>(k) * d) : 0.0;
  const CMatrix g = f.gram();
  double dev = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) dev = std::max(dev, std::abs(std::norm(g(i, j)) - r.overlap_target));
  r.max_overlap_deviation = dev;
  r.is_equiangular = dev <= tolerance;
  return r;
}

Frame simplex_frame(int d) {
  if (d < 1) throw ValidationError("simplex_frame: d must be >= 1");
  const double dd = d;
  const double diag = std::sqrt(1.0 + 1.0 / dd);
  const double shift = std::pow(dd, -1.5) * (std::sqrt(dd + 1.0) + 1.0);
  std::vector<StateVector> v;
  for (int i = 1; i <= d; ++i) {
    RVector psi = RVector::Constant(d, -shift);
    psi[i - 1] += diag;
    v.push_back(real_state(psi));
  }
  v.push_back(real_state(RVector::Constant(d, 1.0 / std::sqrt(dd))));
  return Frame(Field::Real, std::move(v));
}

Frame tetrahedron_frame() {
  std::vector<StateVector> v;
  for (int j = 1; j <= 3; ++j) {
    CVector psi = basis(2, 1) + kSqrt2 * root_of_unity(j, 3) * basis(2, 2);
    v.push_back(StateVector::normalized(psi / kSqrt3, Field::Complex));
  }
  v.push_back(StateVector::normalized(basis(2, 1), Field::Complex));
  return Frame(Field::Complex, std::move(v));
}

Frame icosahedron_frame() {
  const double phi = std::numbers::phi;
  std::vector<StateVector> v;
  for (int s : {0, 3}) {
    const double sign = s == 0 ? 1.0 : -1.0;
    for (int j = 1; j <= 3; ++j) {
      RVector psi = RVector::Zero(3);
      psi[j - 1] = phi;
      psi[j % 3] = sign;  // |j+1> with |4> == |1>
      v.push_back(real_state(psi / std::sqrt(phi + 2.0)));
    }
  }
  return Frame(Field::Real, std::move(v));
}

std::string to_string(QrVariant v) {
  switch (v) {
    case QrVariant::Upper: return "upper";
    case QrVariant::Lower: return "lower";
    case QrVariant::Extended: return "extended";
  }
  return "?";
}

QrVariant qr_variant_from_string(const std::string& name) {
  if (name == "upper") return QrVariant::Upper;
  if (name == "lower") return QrVariant::Lower;
  if (name == "extended") return QrVariant::Extended;
  throw UnknownCaseError("unknown quadratic-residue variant '" + name + "'");
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

Complex quadratic_gauss_sum(int p, int j, int lo, int hi) {
  Complex s = 0.0;
  for (long long a = lo; a <= hi; ++a) s += root_of_unity(static_cast<long long>(j) * a * a, p);
  return s;
}

Frame quadratic_residue_frame(int p, QrVariant variant) {
  if (p < 3 || !is_prime(p)) throw ValidationError("quadratic_residue_frame: p must be an odd prime");
  if (variant != QrVariant::Extended && (p + 1) % 4 != 0)
    throw ValidationError("quadratic_residue_frame: upper/lower variants need 4 | p+1");
  std::vector<StateVector> v;
  switch (variant) {
    case QrVariant::Upper: {
      const int d = (p + 1) / 2;
      for (int j = 1; j <= p; ++j) {
        CVector psi(d);
        for (int a = 0; a < d; ++a) psi[a] = root_of_unity(static_cast<long long>(j) * a * a, p);
        v.push_back(StateVector::normalized(std::move(psi), Field::Complex));
      }
      break;
    }
    case QrVariant::Lower: {
      const int d = (p - 1) / 2;
      for (int j = 1; j <= p; ++j) {
        CVector psi(d);
        for (int a = 1; a <= d; ++a) psi[a - 1] = root_of_unity(static_cast<long long>(j) * a * a, p);
        v.push_back(StateVector::normalized(std::move(psi), Field::Complex));
      }
      break;
    }
    case QrVariant::Extended: {
      const int d = (p + 1) / 2;
      for (int j = 1; j <= p; ++j) {
        CVector psi(d);
        for (int a = 1; a <= d - 1; ++a) psi[a - 1] = kSqrt2 * root_of_unity(static_cast<long long>(j) * a * a, p);
        psi[d - 1] = 1.0;
        v.push_back(StateVector::normalized(std::move(psi), Field::Complex));
      }
      v.push_back(StateVector::normalized(basis(d, d), Field::Complex));
      break;
    }
  }
  return Frame(Field::Complex, std::move(v));
}

Frame dual_frame(const Frame& f) {
  const int d = f.dim();
  const int n = f.size();
  if (n == d) throw ValidationError("dual_frame: k+1 == d gives a zero-dimensional dual");
  if (!verify_etf(f, 1e-10).passed()) throw ValidationError("dual_frame: input is not an ETF");
  const CMatrix rows = std::sqrt(static_cast<double>(d) / n) * f.coefficients();
  const CMatrix extra = orthonormal_completion(rows);
  const double rescale = std::sqrt(static_cast<double>(n) / (n - d));
  std::vector<StateVector> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    CVector col = rescale * extra.col(j);
    if (f.field() == Field::Real) col = col.real().cast<Complex>();
    v.push_back(StateVector::normalized(std::move(col), f.field()));
  }
  return Frame(f.field(), std::move(v));
}

RVector gram_spectrum(const Frame& f) { return hermitian_eigenvalues(f.gram()); }

PreparationEnsemble frame_ensemble(const Frame& f) { return PreparationEnsemble::from_pure(f.vectors()); }

Povm frame_povm(const Frame& f) {
  const FrameReport r = verify_etf(f, 1e-10);
  if (!r.is_tight) throw ValidationError("frame_povm: frame is not tight");
  const double w = static_cast<double>(f.dim()) / f.size();
  std::vector<MeasurementOperator> m;
  for (const auto& v : f.vectors()) m.push_back(rank_one(v.components(), w, f.field()));
  return Povm(std::move(m));
}

std::pair<PreparationEnsemble, Povm> saturating_diagonal_example(int d, int n) {
  if (d < 1 || n < d) throw ValidationError("saturating_diagonal_example: requires n >= d >= 1");
  std::vector<StateVector> states;
  if (d == n) {
    for (int a = 1; a <= n; ++a) states.push_back(real_state(basis(d, a).real()));
  } else {
    const double scale = std::sqrt(2.0 / d);
    for (int a = 1; a <= n; ++a) {
      RVector v = RVector::Zero(d);
      if (d % 2 == 1) v[d - 1] = 1.0 / kSqrt2;
      for (int j = 1; 2 * j <= d; ++j) {
        const double angle = 2.0 * std::numbers::pi * a * j / n;
        v[2 * j - 2] = std::cos(angle);
        v[2 * j - 1] = std::sin(angle);
      }
      states.push_back(real_state(scale * v));
    }
  }
  std::vector<MeasurementOperator> m;
  for (const auto& s : states) m.push_back(rank_one(s.components(), static_cast<double>(d) / n, Field::Real));
  return {PreparationEnsemble::from_pure(states), Povm(std::move(m))};
}

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::D3K4Real: return "d3k4_real";
    case CaseId::D3K4Complex: return "d3k4_complex";
    case CaseId::D4K5Real: return "d4k5_real";
    case CaseId::D4K5Complex: return "d4k5_complex";
  }
  return "?";
}

CaseId case_id_from_string(const std::string& name) {
  if (name == "d3k4_real") return CaseId::D3K4Real;
  if (name == "d3k4_complex") return CaseId::D3K4Complex;
  if (name == "d4k5_real") return CaseId::D4K5Real;
  if (name == "d4k5_complex") return CaseId::D4K5Complex;
  throw UnknownCaseError("unknown optimum case '" + name + "'");
}

std::pair<PreparationEnsemble, Povm> d3k4_complex_family(double a, double d) {
  if (a < 0.0 || a > 1.0 || d < 0.0 || d > 1.0)
    throw ValidationError("d3k4_complex_family: A and D must lie in [0, 1]");
  const double b = std::sqrt(1.0 - a * a);
  const double c = std::sqrt(1.0 - d * d);
  std::vector<StateVector> states;
  std::vector<MeasurementOperator> m;
  for (int j = 1; j <= 2; ++j) {
    states.push_back(StateVector::normalized(basis(3, j), Field::Complex));
    m.push_back(rank_one(basis(3, j), c * c, Field::Complex));
  }
  for (int j = 3; j <= 5; ++j) {
    const Complex w1 = root_of_unity(j, 3);
    const Complex w2 = root_of_unity(2LL * j, 3);
    CVector psi = (a * (w1 * basis(3, 1) + w2 * basis(3, 2)) + kSqrt2 * b * basis(3, 3)) / kSqrt2;
    CVector mj = (d * (w1 * basis(3, 1) + w2 * basis(3, 2)) + basis(3, 3)) / kSqrt3;
    states.push_back(StateVector::normalized(std::move(psi), Field::Complex));
    m.push_back(rank_one(mj, 1.0, Field::Complex));
  }
  return {PreparationEnsemble::from_pure(states), Povm(std::move(m))};
}

double d3k4_complex_closed_form(double a, double d) {
  const double b = std::sqrt(1.0 - a * a);
  const double c = std::sqrt(1.0 - d * d);
  const double f = kSqrt2 * b + a * d / 2.0;
  return std::pow(c, 4) * a * a * b * b * d * d * f * f;
}

std::pair<PreparationEnsemble, Povm> d4k5_complex_family(const D4K5Params& q) {
  const double rn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z + q.t * q.t);
  const double cn = std::hypot(q.a, q.b);
  if (std::abs(rn - 1.0) > 1e-12 || std::abs(cn - 1.0) > 1e-12)
    throw ValidationError("d4k5_complex_family: parameters must lie on the 3-sphere and circle");
  std::vector<StateVector> states;
  std::vector<CVector> ms;
  for (int j = 1; j <= 3; ++j) {
    const Complex w1 = root_of_unity(j, 3), w2 = root_of_unity(2LL * j, 3);
    states.push_back(StateVector::normalized(
        q.x * basis(4, 1) + q.y * basis(4, 2) + q.z * w1 * basis(4, 3) + q.t * w2 * basis(4, 4), Field::Complex));
    ms.push_back(basis(4, 1) + q.a * w1 * basis(4, 3) + q.b * w2 * basis(4, 4));
  }
  for (int j = 1; j <= 3; ++j) {
    const Complex w1 = root_of_unity(j, 3), w2 = root_of_unity(2LL * j, 3);
    states.push_back(StateVector::normalized(
        q.y * basis(4, 1) + q.x * basis(4, 2) + q.t * w1 * basis(4, 3) + q.z * w2 * basis(4, 4), Field::Complex));
    ms.push_back(basis(4, 2) + q.b * w1 * basis(4, 3) + q.a * w2 * basis(4, 4));
  }
  std::vector<MeasurementOperator> m;
  for (const auto& v : ms) m.push_back(rank_one(v, 1.0 / 3.0, Field::Complex));
  return {PreparationEnsemble::from_pure(states), Povm(std::move(m))};
}

double d4k5_complex_closed_form(const D4K5Params& q) {
  const double f1 = q.x * q.z * q.a - q.y * q.t * q.a - q.y * q.z * q.b + q.x * q.t * q.b;
  const double f2 = q.x * q.z * q.a + q.y * q.t * q.a + q.y * q.z * q.b + q.x * q.t * q.b + 2.0 * q.z * q.t * q.a * q.b;
  const double f3 = q.x * q.x - q.y * q.y + (q.z * q.z - q.t * q.t) * (q.a * q.a - q.b * q.b);
  return f1 * f1 * f2 * f2 * f3;
}

namespace {

OptimumCase make_case(CaseId id, int d, int k, std::pair<PreparationEnsemble, Povm> family, double expected) {
  return OptimumCase{id, d, k, std::move(family.first), std::move(family.second), expected, theorem_bound(d, k)};
}

}  // namespace

OptimumCase appendix_optimum(CaseId id) {
  switch (id) {
    case CaseId::D3K4Real: {
      const RVector e1 = basis(3, 1).real(), e2 = basis(3, 2).real(), e3 = basis(3, 3).real();
      std::vector<StateVector> s = {real_state((e1 + kSqrt3 * e2) / 2.0), real_state((e1 - kSqrt3 * e2) / 2.0),
                                    real_state((e1 + kSqrt3 * e3) / 2.0), real_state((e1 - kSqrt3 * e3) / 2.0),
                                    real_state(e1)};
      const std::vector<RVector> ms = {e1 / 2.0 + e2, e1 / 2.0 - e2, e1 / 2.0 + e3, e1 / 2.0 - e3, e1};
      std::vector<MeasurementOperator> m;
      for (const auto& v : ms) m.push_back(rank_one(v.cast<Complex>(), 0.5, Field::Real));
      return make_case(id, 3, 4, {PreparationEnsemble::from_pure(s), Povm(std::move(m))}, std::pow(3.0 / 8.0, 3));
    }
    case CaseId::D3K4Complex:
      return make_case(id, 3, 4, d3k4_complex_family(kD3K4ComplexA, kD3K4ComplexD), 0.0585806);
    case CaseId::D4K5Real: {
      const double a = std::sqrt(0.7), b = std::sqrt(0.3);
      const double big_a = 1.0 / kSqrt2, big_b = 1.0 / std::sqrt(6.0);
      std::vector<StateVector> s;
      std::vector<MeasurementOperator> m;
      for (double sign : {1.0, -1.0}) {
        for (int j = 1; j <= 3; ++j) {
          s.push_back(real_state(a * basis(4, j).real() + sign * b * basis(4, 4).real()));
          m.push_back(rank_one((big_a * basis(4, j) + sign * big_b * basis(4, 4)), 1.0, Field::Real));
        }
      }
      const double expected = 343.0 * std::sqrt(7.0) / (4.0 * 3125.0);
      return make_case(id, 4, 5, {PreparationEnsemble::from_pure(s), Povm(std::move(m))}, expected);
    }
    case CaseId::D4K5Complex:
      return make_case(id, 4, 5, d4k5_complex_family(d4k5_complex_best()), 0.074847);
  }
  throw UnknownCaseError("unknown optimum case");
}

}  // namespace nullwit
