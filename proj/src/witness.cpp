#include "nullwit/witness.hpp"

#include <cmath>

#include "nullwit/errors.hpp"

namespace nullwit {

std::string to_string(Model model) {
  switch (model) {
    case Model::Classical: return "classical";
    case Model::QuantumReal: return "quantum_real";
    case Model::QuantumComplex: return "quantum_complex";
  }
  return "?";
}

Model model_from_string(const std::string& name) {
  if (name == "classical") return Model::Classical;
  if (name == "real" || name == "quantum_real") return Model::QuantumReal;
  if (name == "complex" || name == "quantum_complex") return Model::QuantumComplex;
  throw ValidationError("unknown model '" + name + "'");
}

double witness_full(const RMatrix& p) {
  if (p.rows() != p.cols() || p.rows() == 0) throw ValidationError("witness: matrix must be square");
  return Eigen::PartialPivLU<RMatrix>(p).determinant();
}

double witness_reduced(const RMatrix& p) {
  if (p.rows() != p.cols() || p.rows() == 0) throw ValidationError("witness: matrix must be square");
  const Eigen::Index k = p.rows() - 1;
  if (k == 0) return 1.0;
  RMatrix r = p.topLeftCorner(k, k);
  r.colwise() -= p.col(k).head(k);
  return Eigen::PartialPivLU<RMatrix>(r).determinant();
}

double theorem_bound(int d, int k) {
  if (d < 1 || k < 1) throw ValidationError("theorem_bound: d and k must be >= 1");
  if (d > k) return 1.0;
  return std::pow(static_cast<double>(d - 1) / k, k);
}

double product_bound(int d, int n) {
  if (d < 1 || n < 1) throw ValidationError("product_bound: d and n must be >= 1");
  return std::min(1.0, std::pow(static_cast<double>(d) / n, n));
}

double classical_product_bound(int d, int n) {
  if (d < 1 || n < d) throw ValidationError("classical_product_bound: requires n >= d >= 1");
  const int q = n / d;
  const int r = n % d;
  return 1.0 / (std::pow(q, q * (d - r)) * std::pow(q + 1, (q + 1) * r));
}

double diagonal_product(const RMatrix& p) {
  if (p.rows() != p.cols()) throw ValidationError("diagonal_product: matrix must be square");
  return p.diagonal().prod();
}

int zero_threshold(Model model, int d) {
  if (d < 1) throw ValidationError("zero_threshold: d must be >= 1");
  switch (model) {
    case Model::Classical: return d;
    case Model::QuantumReal: return d * (d + 1) / 2;
    case Model::QuantumComplex: return d * d;
  }
  return d;
}

int CertifiedDims::operator[](Model m) const {
  switch (m) {
    case Model::Classical: return classical;
    case Model::QuantumReal: return quantum_real;
    case Model::QuantumComplex: return quantum_complex;
  }
  return 0;
}

CertifiedDims certified_min_dimension(double w_value, int k, double eps) {
  if (!(eps > 0.0)) throw ValidationError("certified_min_dimension: eps must be positive");
  CertifiedDims out;
  if (std::abs(w_value) <= eps) return out;
  auto smallest = [k](Model m) {
    int d = 1;
    while (zero_threshold(m, d) <= k) ++d;
    return d;
  };
  out.classical = smallest(Model::Classical);
  out.quantum_real = smallest(Model::QuantumReal);
  out.quantum_complex = smallest(Model::QuantumComplex);
  return out;
}

WitnessReport make_witness_report(const RMatrix& p, double eps) {
  WitnessReport r;
  r.k = static_cast<int>(p.rows()) - 1;
  r.value_full = witness_full(p);
  r.value_reduced = witness_reduced(p);
  if (r.k >= 1)
    for (int d = 1; d <= r.k + 1; ++d) r.theorem_bound[d] = theorem_bound(d, r.k);
  r.certified_min_dim = certified_min_dimension(r.value_full, r.k, eps);
  r.tolerance_used = eps;
  return r;
}

RMatrix random_stochastic_matrix(int n, int m, RngStream& rng) {
  RMatrix q(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) q(i, j) = rng.exponential();
    q.col(j) /= q.col(j).sum();
  }
  return q;
}

RMatrix random_model_matrix(Model model, int d, int k, RngStream& rng) {
  const int n = k + 1;
  if (model == Model::Classical) {
    const RMatrix q = random_stochastic_matrix(n, d, rng);
    const RMatrix r = random_stochastic_matrix(d, n, rng);
    return q * r;
  }
  const Field field = model == Model::QuantumReal ? Field::Real : Field::Complex;
  std::vector<CVector> states;
  states.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) states.push_back(random_pure_state(d, field, rng).components());
  const Povm povm = random_povm(d, n, 1, field, rng);
  std::vector<CMatrix> ops;
  for (const auto& m : povm.elements()) ops.push_back(m.matrix());
  return probability_matrix_raw(states, ops);
}

}  // namespace nullwit
