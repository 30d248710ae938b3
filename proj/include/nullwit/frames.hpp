#pragma once

// Equiangular tight frames (ETFs) and the explicit state/measurement
// families that saturate or approach the witness bound.
//
// Formulas are written with 1-based basis labels |1>..|d>; storage is
// 0-based, so |a> lives at index a-1 in every constructor below.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nullwit/qcore.hpp"

namespace nullwit {

class Frame {
 public:
  /// All vectors must share dim and carry the frame's field.
  Frame(Field field, std::vector<StateVector> vectors);

  int dim() const { return vectors_.front().dim(); }
  int size() const { return static_cast<int>(vectors_.size()); }  // k + 1
  int k() const { return size() - 1; }
  Field field() const { return field_; }
  const std::vector<StateVector>& vectors() const { return vectors_; }

  /// d x (k+1) coefficient matrix, column j = |psi_j>.
  CMatrix coefficients() const;
  /// S = sum_j |psi_j><psi_j|.
  CMatrix frame_operator() const;
  /// G_ij = <psi_i|psi_j>.
  CMatrix gram() const;

 private:
  Field field_;
  std::vector<StateVector> vectors_;
};

struct FrameReport {
  bool is_tight = false;
  double max_frame_deviation = 0.0;  // max entry of |S - (k+1)/d 1|
  bool is_equiangular = false;
  double overlap_target = 0.0;       // (k+1-d)/(k d)
  double max_overlap_deviation = 0.0;
  bool passed() const { return is_tight && is_equiangular; }
};

FrameReport verify_etf(const Frame& f, double tolerance = 1e-10);

Frame simplex_frame(int d);
Frame tetrahedron_frame();
Frame icosahedron_frame();

enum class QrVariant { Upper, Lower, Extended };
std::string to_string(QrVariant v);
QrVariant qr_variant_from_string(const std::string& name);

bool is_prime(int p);

/// Gaussian-sum frames for an odd prime p with zeta = exp(2 pi i / p):
///   Upper    (4 | p+1): d = (p+1)/2, |psi_j> ~ sum_{a=0}^{d-1} zeta^{j a^2} |a+1>
///   Lower    (4 | p+1): d = (p-1)/2, |psi_j> ~ sum_{a=1}^{d}   zeta^{j a^2} |a>
///   Extended (any odd p): d = (p+1)/2, k+1 = p+1,
///     sqrt(p)|psi_j> = |d> + sqrt(2) sum_{a=1}^{d-1} zeta^{j a^2} |a>,  |psi_{p+1}> = |d>
/// with j = 1..p. Vectors are normalized on output.
Frame quadratic_residue_frame(int p, QrVariant variant);

/// Gauss sum sum_{a=lo}^{hi} zeta^{j a^2} for zeta = exp(2 pi i / p).
Complex quadratic_gauss_sum(int p, int j, int lo, int hi);

/// ETF in dimension k+1-d obtained by orthonormal completion of the scaled
/// coefficient rows. Throws if f is not an ETF or k+1 == d.
Frame dual_frame(const Frame& f);

/// Ascending eigenvalues of the Gram matrix.
RVector gram_spectrum(const Frame& f);

PreparationEnsemble frame_ensemble(const Frame& f);

/// M_j = d/(k+1) |psi_j><psi_j|; requires a tight frame.
Povm frame_povm(const Frame& f);

/// Real harmonic-frame construction saturating the diagonal-product bound:
/// rho_a = |a><a|, M_a = rho_a d/n, prod_i p_ii = (d/n)^n.
std::pair<PreparationEnsemble, Povm> saturating_diagonal_example(int d, int n);

enum class CaseId { D3K4Real, D3K4Complex, D4K5Real, D4K5Complex };
std::string to_string(CaseId id);
CaseId case_id_from_string(const std::string& name);  // throws UnknownCaseError

struct OptimumCase {
  CaseId id;
  int d = 0;
  int k = 0;
  PreparationEnsemble ensemble;
  Povm povm;
  double expected_value = 0.0;
  double theorem_gap_bound = 0.0;  // theorem_bound(d, k) for comparison
};

OptimumCase appendix_optimum(CaseId id);

/// d=3, k=4 complex family; requires 0 <= A, D <= 1.
std::pair<PreparationEnsemble, Povm> d3k4_complex_family(double a, double d);
/// Closed form C^4 A^2 B^2 D^2 (sqrt2 B + A D / 2)^2 of the family above.
double d3k4_complex_closed_form(double a, double d);

/// Parameters of the d=4, k=5 complex family; x^2+y^2+z^2+t^2 = 1, A^2+B^2 = 1.
struct D4K5Params {
  double x, y, z, t, a, b;
};
std::pair<PreparationEnsemble, Povm> d4k5_complex_family(const D4K5Params& prm);
double d4k5_complex_closed_form(const D4K5Params& prm);

/// Best-found point of the d=4, k=5 complex family (see tools/regen_constants).
D4K5Params d4k5_complex_best();

inline constexpr double kD3K4ComplexA = 0.617344;
inline constexpr double kD3K4ComplexD = 0.603104;

}  // namespace nullwit
