#include "nullwit/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nullwit/errors.hpp"

namespace nullwit {

namespace {

bool has_imaginary(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (m.data()[i].imag() != 0.0) return true;
  return false;
}

bool has_imaginary(const CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i].imag() != 0.0) return true;
  return false;
}

double hermitian_deviation(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void check_operator(const CMatrix& m, Field field, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw ValidationError(std::string(what) + ": matrix must be square and nonempty");
  if (field == Field::Real && has_imaginary(m))
    throw ValidationError(std::string(what) + ": real-tagged operator has imaginary entries");
  if (hermitian_deviation(m) > tol::kHermitian)
    throw ValidationError(std::string(what) + ": matrix is not Hermitian");
  if (hermitian_eigenvalues(m).minCoeff() < -tol::kPsd)
    throw ValidationError(std::string(what) + ": matrix is not positive semidefinite");
}

Field common_field(auto const& items) {
  for (const auto& x : items)
    if (x.field() == Field::Complex) return Field::Complex;
  return Field::Real;
}

}  // namespace

std::string to_string(Field field) { return field == Field::Real ? "real" : "complex"; }

Field field_from_string(const std::string& name) {
  if (name == "real" || name == "r") return Field::Real;
  if (name == "complex" || name == "c") return Field::Complex;
  throw ValidationError("unknown field '" + name + "' (expected real or complex)");
}

StateVector::StateVector(CVector components, Field field)
    : components_(std::move(components)), field_(field) {
  if (components_.size() == 0) throw ValidationError("StateVector: dimension must be positive");
  if (field_ == Field::Real && has_imaginary(components_))
    throw ValidationError("StateVector: real-tagged vector has imaginary components");
  const double n2 = components_.squaredNorm();
  if (std::abs(n2 - 1.0) > tol::kNorm) {
    std::ostringstream os;
    os << "StateVector: squared norm " << n2 << " differs from 1";
    throw ValidationError(os.str());
  }
}

StateVector StateVector::normalized(CVector components, Field field) {
  const double n = components.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("StateVector: cannot normalize zero vector");
  components /= n;
  return StateVector(std::move(components), field);
}

StateVector StateVector::from_real(const RVector& components) {
  return normalized(components.cast<Complex>(), Field::Real);
}

DensityOperator::DensityOperator(CMatrix matrix, Field field) : matrix_(std::move(matrix)), field_(field) {
  check_operator(matrix_, field_, "DensityOperator");
  if (std::abs(matrix_.trace() - Complex(1.0)) > tol::kTrace)
    throw ValidationError("DensityOperator: trace differs from 1");
}

MeasurementOperator::MeasurementOperator(CMatrix matrix, Field field)
    : matrix_(std::move(matrix)), field_(field) {
  check_operator(matrix_, field_, "MeasurementOperator");
}

PovmReport validate_povm(std::span<const MeasurementOperator> elements, double tolerance) {
  PovmReport report;
  if (elements.empty()) return report;
  const int d = elements.front().dim();
  CMatrix sum = CMatrix::Zero(d, d);
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& m : elements) {
    if (m.dim() != d) throw ValidationError("validate_povm: elements differ in dimension");
    sum += m.matrix();
    min_eig = std::min(min_eig, hermitian_eigenvalues(m.matrix()).minCoeff());
  }
  report.completeness_deviation = (sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  report.min_eigenvalue = min_eig;
  report.passed = report.completeness_deviation <= tolerance && min_eig >= -tolerance;
  return report;
}

Povm::Povm(std::vector<MeasurementOperator> elements, double tolerance) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("Povm: no elements");
  const PovmReport r = validate_povm(elements_, tolerance);
  if (!r.passed) {
    std::ostringstream os;
    os << "Povm: completeness deviation " << r.completeness_deviation << ", min eigenvalue "
       << r.min_eigenvalue;
    throw ValidationError(os.str());
  }
}

Field Povm::field() const { return common_field(elements_); }

PreparationEnsemble::PreparationEnsemble(std::vector<DensityOperator> states) : states_(std::move(states)) {
  if (states_.empty()) throw ValidationError("PreparationEnsemble: no states");
  for (const auto& s : states_)
    if (s.dim() != states_.front().dim())
      throw ValidationError("PreparationEnsemble: states differ in dimension");
}

PreparationEnsemble PreparationEnsemble::from_pure(std::span<const StateVector> states) {
  std::vector<DensityOperator> rho;
  rho.reserve(states.size());
  for (const auto& v : states) rho.push_back(density_from_vector(v));
  return PreparationEnsemble(std::move(rho));
}

Field PreparationEnsemble::field() const { return common_field(states_); }

ColumnCheck column_sum_deviation(const RMatrix& p) {
  ColumnCheck c;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double dev = std::abs(p.col(j).sum() - 1.0);
    if (dev > c.max_deviation || c.worst_column < 0) {
      c.max_deviation = dev;
      c.worst_column = static_cast<int>(j);
    }
  }
  return c;
}

ProbabilityMatrix::ProbabilityMatrix(RMatrix entries, double column_tolerance) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw ValidationError("ProbabilityMatrix: empty matrix");
  if (!entries_.allFinite()) throw ValidationError("ProbabilityMatrix: non-finite entry");
  if (entries_.minCoeff() < -tol::kEntry || entries_.maxCoeff() > 1.0 + tol::kEntry)
    throw ValidationError("ProbabilityMatrix: entry outside [0, 1]");
  const ColumnCheck c = column_sum_deviation(entries_);
  if (c.max_deviation > column_tolerance) {
    std::ostringstream os;
    os << "ProbabilityMatrix: column " << c.worst_column << " sums to 1 "
       << (entries_.col(c.worst_column).sum() >= 1.0 ? "+ " : "- ") << c.max_deviation;
    throw ValidationError(os.str());
  }
}

DensityOperator density_from_vector(const StateVector& v) {
  CMatrix rho = v.components() * v.components().adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator(std::move(rho), v.field());
}

RMatrix probability_matrix_raw(std::span<const CVector> states, std::span<const CMatrix> povm) {
  RMatrix p(static_cast<Eigen::Index>(povm.size()), static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) {
    for (std::size_t i = 0; i < povm.size(); ++i) {
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          states[j].dot(povm[i] * states[j]).real();
    }
  }
  return p;
}

ProbabilityMatrix probability_matrix(const PreparationEnsemble& ensemble, const Povm& povm) {
  if (ensemble.dim() != povm.dim()) throw ValidationError("probability_matrix: dimension mismatch");
  RMatrix p(povm.size(), ensemble.size());
  for (int i = 0; i < povm.size(); ++i)
    for (int j = 0; j < ensemble.size(); ++j)
      p(i, j) = (povm[i].matrix() * ensemble[j].matrix()).trace().real();
  if (p.minCoeff() < -tol::kPsd || p.maxCoeff() > 1.0 + tol::kPsd)
    throw ValidationError("probability_matrix: probability outside [0, 1] beyond tolerance");
  p = p.cwiseMax(0.0).cwiseMin(1.0);
  return ProbabilityMatrix(std::move(p));
}

RVector hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

StateVector random_pure_state(int d, Field field, RngStream& rng) {
  if (d < 1) throw ValidationError("random_pure_state: d must be >= 1");
  CVector v(d);
  for (int a = 0; a < d; ++a) {
    const double re = rng.normal();
    const double im = field == Field::Complex ? rng.normal() : 0.0;
    v[a] = Complex(re, im);
  }
  return StateVector::normalized(std::move(v), field);
}

CMatrix haar_unitary(int d, Field field, RngStream& rng) {
  CMatrix g(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r)
      g(r, c) = Complex(rng.normal(), field == Field::Complex ? rng.normal() : 0.0);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c) {
    const double mag = std::abs(r(c, c));
    const Complex phase = mag > 0.0 ? r(c, c) / mag : Complex(1.0);
    q.col(c) *= phase;
  }
  if (field == Field::Real) q = q.real().cast<Complex>();
  return q;
}

std::vector<CMatrix> cascade_povm_raw(int d, int rank, std::span<const std::vector<double>> angles,
                                      std::span<const CMatrix> rotations) {
  const std::size_t steps = angles.size();
  std::vector<CMatrix> out;
  out.reserve(steps + 1);
  CMatrix t = CMatrix::Identity(d, d);
  CMatrix sum = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < steps; ++i) {
    RVector s2 = RVector::Zero(d);
    RVector c = RVector::Ones(d);
    for (int a = 0; a < rank && a < d; ++a) {
      const double phi = angles[i][static_cast<std::size_t>(a)];
      const double s = std::sin(phi);
      s2[a] = s * s;
      c[a] = std::cos(phi);
    }
    CMatrix m = t * s2.cast<Complex>().asDiagonal() * t.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    sum += m;
    out.push_back(std::move(m));
    t = t * c.cast<Complex>().asDiagonal();
    if (i < rotations.size()) t = t * rotations[i];
  }
  CMatrix last = CMatrix::Identity(d, d) - sum;
  last = 0.5 * (last + last.adjoint()).eval();
  out.push_back(std::move(last));
  return out;
}

Povm cascade_povm(int d, int rank, Field field, std::span<const std::vector<double>> angles,
                  std::span<const CMatrix> rotations) {
  for (const auto& a : angles)
    if (static_cast<int>(a.size()) < rank) throw ValidationError("cascade_povm: too few angles per step");
  std::vector<CMatrix> raw = cascade_povm_raw(d, rank, angles, rotations);
  std::vector<MeasurementOperator> elems;
  elems.reserve(raw.size());
  for (auto& m : raw) {
    if (field == Field::Real) m = m.real().cast<Complex>();
    elems.emplace_back(std::move(m), field);
  }
  return Povm(std::move(elems));
}

Povm random_povm(int d, int n, int rank, Field field, RngStream& rng) {
  if (d < 1) throw ValidationError("random_povm: d must be >= 1");
  if (n < 2) throw ValidationError("random_povm: need at least two outcomes");
  const int max_rank = std::max(1, d / 2);
  if (rank < 1 || rank > max_rank) throw ValidationError("random_povm: rank out of range");
  std::vector<std::vector<double>> angles(static_cast<std::size_t>(n - 1));
  std::vector<CMatrix> rotations;
  for (int i = 0; i < n - 1; ++i) {
    for (int a = 0; a < rank; ++a) angles[static_cast<std::size_t>(i)].push_back(rng.uniform() * M_PI);
    if (i < n - 2) rotations.push_back(haar_unitary(d, field, rng));
  }
  return cascade_povm(d, rank, field, angles, rotations);
}

CMatrix orthonormal_completion(const CMatrix& rows) {
  const Eigen::Index count = rows.rows();
  const Eigen::Index dim = rows.cols();
  if (count > dim) throw ValidationError("orthonormal_completion: more rows than coordinates");
  if (count > 0) {
    const double dev = (rows * rows.adjoint() - CMatrix::Identity(count, count)).cwiseAbs().maxCoeff();
    if (dev > tol::kOrthonormal) throw ValidationError("orthonormal_completion: input rows not orthonormal");
  }
  const bool real_input = !has_imaginary(CMatrix(rows));
  // Basis as columns for convenience.
  CMatrix basis(dim, dim);
  basis.leftCols(count) = rows.adjoint();
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  for (Eigen::Index filled = count; filled < dim; ++filled) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    CVector best_vec;
    for (Eigen::Index e = 0; e < dim; ++e) {
      if (used[static_cast<std::size_t>(e)]) continue;
      CVector v = CVector::Unit(dim, e);
      for (int pass = 0; pass < 2; ++pass)
        v -= basis.leftCols(filled) * (basis.leftCols(filled).adjoint() * v);
      const double nrm = v.norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = e;
        best_vec = std::move(v);
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    basis.col(filled) = best_vec / best_norm;
  }
  CMatrix extra = basis.rightCols(dim - count).adjoint();
  if (real_input) extra = extra.real().cast<Complex>();
  return extra;
}

}  // namespace nullwit
