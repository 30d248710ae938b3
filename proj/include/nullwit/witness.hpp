#pragma once

// Determinant witness W_k = det p for (k+1)-outcome, (k+1)-preparation
// statistics, its analytic bounds and the inversion of zero thresholds
// into certified minimum dimensions.

#include <map>
#include <string>

#include "nullwit/qcore.hpp"

namespace nullwit {

enum class Model { Classical, QuantumReal, QuantumComplex };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

inline constexpr double kDefaultNullTolerance = 1e-9;

/// det p by LU with partial pivoting. Throws ValidationError if not square.
double witness_full(const RMatrix& p);
inline double witness_full(const ProbabilityMatrix& p) { return witness_full(p.matrix()); }

/// det of the k x k matrix p_ij - p_{i,k+1} (i, j <= k).
double witness_reduced(const RMatrix& p);
inline double witness_reduced(const ProbabilityMatrix& p) { return witness_reduced(p.matrix()); }

/// min[1, (d-1)^k / k^k]: 1 if d > k.
double theorem_bound(int d, int k);

/// min[1, (d/n)^n] on the diagonal product for n outcomes/preparations.
double product_bound(int d, int n);

/// 1 / (q^{q(d-r)} (q+1)^{(q+1)r}) with n = q d + r, 0 <= r < d. Requires n >= d.
double classical_product_bound(int d, int n);

double diagonal_product(const RMatrix& p);

/// Largest k for which W_k can be nonzero is zero_threshold - 1:
/// d (classical), d(d+1)/2 (real), d^2 (complex).
int zero_threshold(Model model, int d);

struct CertifiedDims {
  int classical = 0;
  int quantum_real = 0;
  int quantum_complex = 0;

  int operator[](Model m) const;
  bool operator==(const CertifiedDims&) const = default;
};

/// Smallest dimension per model compatible with a nonzero W_k; all 0 when
/// |w| <= eps (no certificate).
CertifiedDims certified_min_dimension(double w_value, int k, double eps = kDefaultNullTolerance);

struct WitnessReport {
  int k = 0;
  double value_full = 0.0;
  double value_reduced = 0.0;
  std::map<int, double> theorem_bound;  // d -> bound, for d = 1..k+1
  CertifiedDims certified_min_dim;
  double tolerance_used = kDefaultNullTolerance;
};

WitnessReport make_witness_report(const RMatrix& p, double eps = kDefaultNullTolerance);

/// Random (k+1) x (k+1) statistics generated by a d-dimensional system of
/// the given model: classical p = q r with Dirichlet-uniform columns, or
/// random pure states and a random rank-1 cascade POVM over the field.
RMatrix random_model_matrix(Model model, int d, int k, RngStream& rng);

/// Column-stochastic n x m matrix with Dirichlet(1,...,1) columns.
RMatrix random_stochastic_matrix(int n, int m, RngStream& rng);

}  // namespace nullwit
