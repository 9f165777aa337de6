#pragma once

#include <Eigen/Dense>

#include <vector>

namespace occnum {

// Confluent hypergeometric series
//   Phi(a,c,x) = 1 + a x / c + a(a+1) x^2 / (2! c(c+1)) + ...
// summed until |term| < 1e-16 |sum| (hard cap 1e5 terms). Requires c > 0;
// throws NumericError on non-convergence.
double hyp1f1(double a, double c, double x);

enum class OscillatorGf { Exact, LargeMu, SmallMu };

// Stationary generating function of the self-exciting oscillator:
//   exact:    Phi(1, mu, mu(1+u)) / Phi(1, mu, 2 mu)
//   large mu: e^{mu(u-1)} ((1+u)/2)^{1-mu}
//   small mu: ((2+u)(1+mu) + mu(1+u)^2) / (3+7mu)
double oscillator_gf(double mu, double u, OscillatorGf variant);

// Exact stationary moments from Phi derivatives plus both limiting
// predictions for comparison.
struct OscillatorMomentSummary {
  double mean = 0.0, variance = 0.0, rel_fluct = 0.0;          // exact
  double mean_large_mu = 0.0, variance_large_mu = 0.0;         // (mu+1)/2, (3mu+1)/4
  double mean_small_mu = 0.0, variance_small_mu = 0.0;         // small-mu expansion
};
OscillatorMomentSummary oscillator_moments(double mu);

// Two-mode predation model in the solvable regime l2^2 = 1 + l1^2:
// G(u,v) = (1-k)^2 / ((1-ku)(1-kv)) with k = l1^2/(1+l1^2). Throws on the
// poles ku >= 1 or kv >= 1.
double lvm_special_gf(double l1, double u, double v);
struct LvmSpecialMoments {
  double kappa = 0.0;
  double mean = 0.0;       // E n1 = E n2 = l1^2
  double variance = 0.0;   // l1^2 + l1^4
  double rel_fluct = 0.0;  // sqrt(1 + 1/l1^2)
};
LvmSpecialMoments lvm_special_moments(double l1);

// Homogeneous degree-N generating polynomial. Coefficients are stored by
// descending power of u: coeffs[j] multiplies u^{N-j} v^j, matching the
// (a,b,c) layout of G_2 = a u^2 + b uv + c v^2.
struct PolynomialGF {
  int degree = 0;
  std::vector<double> coeffs;

  double coeff_u_pow(int k) const { return coeffs[degree - k]; }
  double sum() const;
  double mean_n1() const;  // expected power of u
  double mean_n2() const;
  double eval(double u, double v) const;
};

// Two-kin mutual-predation model on the conserved manifold n1+n2 = N with
// rates a = 2*l2^2 (kin-1 gains) and b = 2*l1^2 (kin-2 gains).
struct CannibalParams {
  int N = 0;
  double a = 0.0;
  double b = 0.0;
  double kappa() const { return a / b; }
  static CannibalParams from_lambdas(int N, double l1, double l2) {
    return {N, 2.0 * l2 * l2, 2.0 * l1 * l1};
  }
};

// Stationary polynomial: A_k proportional to a^k b^{N-k} where k counts
// kin 1 (detailed balance gives A_{k+1}/A_k = a/b exactly). Evaluated as
// geometric weights in kappa to stay finite at large N.
PolynomialGF cannibal_stationary(const CannibalParams& params);

// Stationary ratio E n1 / E n2 through the closed form
//   (k + k^2 dlnf) / (N - k dlnf),  f_N(k) = (1-k^N)/(1-k),
//   dlnf = ((N-1)k^N - N k^{N-1} + 1) / ((1-k)(1-k^N)).
// kappa == 1 returns 1 by the symmetric limit.
double cannibal_ratio(int N, double kappa);

enum class TruncatedLvmVariant { Exact, NicolisPrigogine };

// Coefficient dynamics dA/dt = L A of the conserved predation flow applied
// to monomials u^{N-j} v^j. The first variant comes from the full diagonal
// master equation (per-jump weight (N-j)(j+1)); the second is the classic
// birth-death closure with weight (N-j)j, which freezes the u^N coefficient.
Eigen::MatrixXd truncated_lvm_generator(int N, TruncatedLvmVariant variant);

// exp(L t) A0 by dense scaling-and-squaring; preserves sum(A) = 1.
PolynomialGF evolve_coefficients(const Eigen::MatrixXd& L, const PolynomialGF& A0,
                                 double t);

// Dense matrix exponential (Pade order 13 with scaling and squaring).
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

}  // namespace occnum
