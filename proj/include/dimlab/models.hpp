#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "dimlab/errors.hpp"

namespace dimlab {

using cplx = std::complex<double>;

enum class ModelKind { ScaledExp, Sine, Fatou, Polynomial, Poincare };

// Bivariate polynomial P(w, z), used by Poincare functional equations
// f(s z) = P(f(z), z).
struct Bivariate {
  struct Term {
    cplx coeff;
    int wpow = 0;
    int zpow = 0;
  };
  std::vector<Term> terms;

  cplx eval(cplx w, cplx z) const;
  Bivariate dw() const;
  Bivariate dz() const;
  int w_degree() const;
  // coefficient of w^k, as a polynomial in z evaluated at z
  cplx w_coeff(int k, cplx z) const;

  static Bivariate parse(const std::string& text);
  std::string to_string() const;
};

// All roots of c0 + c1 z + ... + cd z^d (Durand-Kerner with residual polish).
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs);

// An entire function under study. Models are immutable once constructed and
// cheap to copy; evaluation is deterministic.
class FunctionModel {
 public:
  static FunctionModel scaled_exp(cplx lambda);
  static FunctionModel sine(cplx alpha, cplx beta);
  static FunctionModel fatou();
  static FunctionModel polynomial(std::vector<cplx> coeffs);  // c0 + c1 z + ...
  static FunctionModel poincare(cplx s, Bivariate P, cplx seed_deriv = 1.0, int terms = 48);

  // Mini-language: exp:lambda=1 | sin:alpha=1,beta=0 | fatou | poly:-2,1,1 |
  // poincare:s=2,P=w^2,seed=1
  static FunctionModel parse(const std::string& spec);
  std::string spec_string() const;

  ModelKind kind() const { return kind_; }

  cplx eval(cplx z) const;
  cplx deriv(cplx z) const;

  // f'(z)/f(z), stable at large |z| where eval would overflow
  cplx log_derivative(cplx z) const;
  // log|f(z)|, stable at large |z|
  double log_abs(cplx z) const;
  // f(z2)/f(z1) without forming the (possibly huge) values themselves
  cplx value_ratio(cplx z2, cplx z1) const;
  // log f(a+delta) - log f(a), continued along the segment [a, a+delta];
  // requires f zero-free on the segment
  cplx log_ratio(cplx a, cplx delta) const;

  bool has_logM_oracle() const;
  double logM_oracle(double r) const;

  bool has_zero_oracle(cplx a) const;
  // All a-points in |z| <= r, sorted by modulus (ties by argument).
  // BoundaryZero if an a-point sits within 1e-9*r of the circle.
  std::vector<cplx> zeros_in_disk(cplx a, double r) const;

  // radius inside which eval meets its error contract
  double certified_radius() const;
  bool in_domain(cplx z) const;

  // Closed-form log f available as an affine-ish local frame; required by
  // constructions that operate at scales where f itself is not representable.
  bool supports_log_frame() const;
  // log f(a + delta) - log f(a) in closed form (exp kind only)
  cplx log_frame_shift(cplx a, cplx delta) const;
  // a branch value of log f(a)
  cplx log_anchor(cplx a) const;

  // parameters (for reports)
  cplx lambda() const { return lambda_; }
  cplx alpha() const { return alpha_; }
  cplx beta() const { return beta_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  cplx multiplier() const { return s_; }

 private:
  FunctionModel() = default;
  void build_poincare_series();
  cplx poincare_taylor(cplx z) const;
  cplx poincare_taylor_deriv(cplx z) const;
  void poincare_pair(cplx z, cplx& f, cplx& fp) const;

  ModelKind kind_ = ModelKind::ScaledExp;
  cplx lambda_{1.0, 0.0};
  cplx alpha_{1.0, 0.0};
  cplx beta_{0.0, 0.0};
  std::vector<cplx> coeffs_;
  // poincare data
  cplx s_{2.0, 0.0};
  Bivariate P_;
  cplx seed_deriv_{1.0, 0.0};
  int terms_ = 48;
  std::vector<cplx> taylor_;
  double seed_radius_ = 0.0;
  double certified_radius_ = 0.0;
  cplx fixed_point_{0.0, 0.0};
};

// Parse a complex literal such as "1", "-2.5", "1+2i", "0.5i".
cplx parse_complex(const std::string& text);
std::string format_complex(cplx v);

}  // namespace dimlab
