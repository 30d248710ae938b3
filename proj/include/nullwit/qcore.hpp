#pragma once

// Field-generic operator algebra for prepare-and-measure scenarios: pure
// states, density operators, POVMs and outcome probability matrices.
//
// Every scalar is stored as std::complex<double>; objects tagged
// Field::Real carry exactly zero imaginary parts.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "nullwit/rng.hpp"

namespace nullwit {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

enum class Field { Real, Complex };

std::string to_string(Field field);
Field field_from_string(const std::string& name);

namespace tol {
inline constexpr double kNorm = 1e-12;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kPsd = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kCompleteness = 1e-10;
inline constexpr double kColumnSum = 1e-10;
inline constexpr double kEntry = 1e-12;
inline constexpr double kOrthonormal = 1e-10;
}  // namespace tol

class StateVector {
 public:
  /// Throws ValidationError unless the vector has unit norm (1e-12) and,
  /// for Field::Real, no imaginary parts.
  StateVector(CVector components, Field field);

  /// Rescales to unit norm; throws on the zero vector.
  static StateVector normalized(CVector components, Field field);
  static StateVector from_real(const RVector& components);

  int dim() const { return static_cast<int>(components_.size()); }
  Field field() const { return field_; }
  const CVector& components() const { return components_; }

 private:
  CVector components_;
  Field field_;
};

class DensityOperator {
 public:
  /// Hermitian (1e-12), unit trace (1e-10), eigenvalues >= -1e-10.
  DensityOperator(CMatrix matrix, Field field);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  Field field() const { return field_; }
  const CMatrix& matrix() const { return matrix_; }

 private:
  CMatrix matrix_;
  Field field_;
};

class MeasurementOperator {
 public:
  /// Hermitian (1e-12) and eigenvalues >= -1e-10.
  MeasurementOperator(CMatrix matrix, Field field);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  Field field() const { return field_; }
  const CMatrix& matrix() const { return matrix_; }
  double trace() const { return matrix_.trace().real(); }

 private:
  CMatrix matrix_;
  Field field_;
};

struct PovmReport {
  double completeness_deviation = 0.0;  // max entry of |sum_i M_i - 1|
  double min_eigenvalue = 0.0;          // most negative eigenvalue over elements
  bool passed = false;
};

PovmReport validate_povm(std::span<const MeasurementOperator> elements, double tolerance);

class Povm {
 public:
  /// Throws ValidationError if validate_povm fails at `tolerance`.
  explicit Povm(std::vector<MeasurementOperator> elements,
                double tolerance = tol::kCompleteness);

  int dim() const { return elements_.front().dim(); }
  int size() const { return static_cast<int>(elements_.size()); }
  Field field() const;
  const std::vector<MeasurementOperator>& elements() const { return elements_; }
  const MeasurementOperator& operator[](int i) const { return elements_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<MeasurementOperator> elements_;
};

class PreparationEnsemble {
 public:
  explicit PreparationEnsemble(std::vector<DensityOperator> states);
  static PreparationEnsemble from_pure(std::span<const StateVector> states);

  int dim() const { return states_.front().dim(); }
  int size() const { return static_cast<int>(states_.size()); }
  Field field() const;
  const std::vector<DensityOperator>& states() const { return states_; }
  const DensityOperator& operator[](int j) const { return states_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<DensityOperator> states_;
};

/// Outcome-by-preparation matrix p(i, j) = Pr(outcome i | preparation j).
class ProbabilityMatrix {
 public:
  /// Columns must sum to 1 within `column_tolerance`; entries in
  /// [-1e-12, 1 + 1e-12].
  explicit ProbabilityMatrix(RMatrix entries, double column_tolerance = tol::kColumnSum);

  int rows() const { return static_cast<int>(entries_.rows()); }
  int cols() const { return static_cast<int>(entries_.cols()); }
  double operator()(int i, int j) const { return entries_(i, j); }
  const RMatrix& matrix() const { return entries_; }

 private:
  RMatrix entries_;
};

/// Largest absolute deviation of a column sum from 1, and the offending column.
struct ColumnCheck {
  double max_deviation = 0.0;
  int worst_column = -1;
};
ColumnCheck column_sum_deviation(const RMatrix& p);

DensityOperator density_from_vector(const StateVector& v);

/// p_ij = Tr(M_i rho_j). Entries in [-1e-10, 0) are clamped to 0 (and above
/// 1 to 1); anything further out is a ValidationError.
ProbabilityMatrix probability_matrix(const PreparationEnsemble& ensemble, const Povm& povm);

/// Fast path without operator validation, used in inner loops.
RMatrix probability_matrix_raw(std::span<const CVector> states, std::span<const CMatrix> povm);

/// Ascending eigenvalues of a Hermitian matrix.
RVector hermitian_eigenvalues(const CMatrix& m);

StateVector random_pure_state(int d, Field field, RngStream& rng);

/// Haar unitary (or orthogonal) from QR of a Gaussian matrix with the R
/// diagonal made positive.
CMatrix haar_unitary(int d, Field field, RngStream& rng);

/// Cascade construction of an n-outcome POVM.
///
/// angles[i] holds the rank angles of step i (i = 0..n-2); rotations[i] is the
/// unitary applied after step i (i = 0..n-3). With T_0 = 1,
///   M_i = T_i S_i^2 T_i^dag,   T_{i+1} = T_i C_i U_i,
/// where S_i (C_i) carries sin (cos) of the angles on the first `rank`
/// diagonal entries and 0 (1) elsewhere. The last element is 1 - sum M_i,
/// which equals T_{n-1} T_{n-1}^dag and is therefore positive.
std::vector<CMatrix> cascade_povm_raw(int d, int rank, std::span<const std::vector<double>> angles,
                                      std::span<const CMatrix> rotations);

Povm cascade_povm(int d, int rank, Field field, std::span<const std::vector<double>> angles,
                  std::span<const CMatrix> rotations);

/// Random cascade POVM with n outcomes, M_1..M_{n-1} of rank <= `rank`.
/// Requires 1 <= rank <= max(1, floor(d/2)) and n >= 2.
Povm random_povm(int d, int n, int rank, Field field, RngStream& rng);

/// Rows of `rows` must be orthonormal (1e-10). Returns the additional rows
/// completing them to an orthonormal basis of the full coordinate space,
/// found by Gram-Schmidt over coordinate vectors with pivoting on the
/// largest residual.
CMatrix orthonormal_completion(const CMatrix& rows);

}  // namespace nullwit
