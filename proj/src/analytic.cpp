#include "occnum/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "occnum/errors.hpp"

namespace occnum {

double hyp1f1(double a, double c, double x) {
  if (!(c > 0.0)) throw std::invalid_argument("hyp1f1: c must be > 0");
  double sum = 1.0, term = 1.0;
  for (long k = 0; k < 100000; ++k) {
    term *= (a + k) * x / ((c + k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum) && k > x) return sum;
  }
  throw NumericError("hyp1f1: series did not converge (x=" + std::to_string(x) +
                     ", c=" + std::to_string(c) + ")");
}

double oscillator_gf(double mu, double u, OscillatorGf variant) {
  if (!(mu > 0.0)) throw std::invalid_argument("oscillator_gf: mu must be > 0");
  switch (variant) {
    case OscillatorGf::Exact:
      return hyp1f1(1.0, mu, mu * (1.0 + u)) / hyp1f1(1.0, mu, 2.0 * mu);
    case OscillatorGf::LargeMu:
      return std::exp(mu * (u - 1.0)) * std::pow((1.0 + u) / 2.0, 1.0 - mu);
    case OscillatorGf::SmallMu:
      return ((2.0 + u) * (1.0 + mu) + mu * (1.0 + u) * (1.0 + u)) / (3.0 + 7.0 * mu);
  }
  throw std::invalid_argument("oscillator_gf: unknown variant");
}

OscillatorMomentSummary oscillator_moments(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("oscillator_moments: mu must be > 0");
  const double phi1 = hyp1f1(1.0, mu, 2.0 * mu);
  // d/dx Phi(a,c,x) = (a/c) Phi(a+1,c+1,x), applied twice to the exact GF.
  const double mean = hyp1f1(2.0, mu + 1.0, 2.0 * mu) / phi1;
  const double second_fact =
      (2.0 * mu / (mu + 1.0)) * hyp1f1(3.0, mu + 2.0, 2.0 * mu) / phi1;
  OscillatorMomentSummary out;
  out.mean = mean;
  out.variance = second_fact + mean - mean * mean;
  out.rel_fluct = std::sqrt(out.variance) / mean;
  out.mean_large_mu = (mu + 1.0) / 2.0;
  out.variance_large_mu = (3.0 * mu + 1.0) / 4.0;
  out.mean_small_mu = (1.0 + 5.0 * mu) / (3.0 + 7.0 * mu);
  const double second_fact_small = 2.0 * mu / (3.0 + 7.0 * mu);
  out.variance_small_mu =
      second_fact_small + out.mean_small_mu - out.mean_small_mu * out.mean_small_mu;
  return out;
}

double lvm_special_gf(double l1, double u, double v) {
  if (!(l1 > 0.0)) throw std::invalid_argument("lvm_special_gf: l1 must be > 0");
  const double kappa = l1 * l1 / (1.0 + l1 * l1);
  if (kappa * u >= 1.0 || kappa * v >= 1.0)
    throw std::invalid_argument("lvm_special_gf: evaluation at or beyond the pole");
  const double one_minus = 1.0 - kappa;
  return one_minus * one_minus / ((1.0 - kappa * u) * (1.0 - kappa * v));
}

LvmSpecialMoments lvm_special_moments(double l1) {
  if (!(l1 > 0.0)) throw std::invalid_argument("lvm_special_moments: l1 must be > 0");
  const double l1sq = l1 * l1;
  LvmSpecialMoments out;
  out.kappa = l1sq / (1.0 + l1sq);
  out.mean = l1sq;
  out.variance = l1sq + l1sq * l1sq;
  out.rel_fluct = std::sqrt(1.0 + 1.0 / l1sq);
  return out;
}

double PolynomialGF::sum() const {
  double s = 0.0;
  for (double c : coeffs) s += c;
  return s;
}

double PolynomialGF::mean_n1() const {
  double s = 0.0;
  for (int j = 0; j <= degree; ++j) s += coeffs[j] * (degree - j);
  return s;
}

double PolynomialGF::mean_n2() const {
  double s = 0.0;
  for (int j = 0; j <= degree; ++j) s += coeffs[j] * j;
  return s;
}

double PolynomialGF::eval(double u, double v) const {
  double s = 0.0;
  for (int j = 0; j <= degree; ++j) {
    double term = coeffs[j];
    for (int k = 0; k < degree - j; ++k) term *= u;
    for (int k = 0; k < j; ++k) term *= v;
    s += term;
  }
  return s;
}

PolynomialGF cannibal_stationary(const CannibalParams& params) {
  if (params.N < 1) throw std::invalid_argument("cannibal_stationary: N must be >= 1");
  if (!(params.a > 0.0) || !(params.b > 0.0))
    throw std::invalid_argument("cannibal_stationary: rates must be > 0");
  const int N = params.N;
  const double kappa = params.kappa();
  PolynomialGF gf;
  gf.degree = N;
  gf.coeffs.assign(N + 1, 0.0);
  // Weight of u-power k is kappa^k up to normalization; anchor the largest
  // weight at 1 so any kappa stays in range.
  double total = 0.0;
  for (int k = 0; k <= N; ++k) {
    const double w = kappa <= 1.0 ? std::pow(kappa, k) : std::pow(1.0 / kappa, N - k);
    gf.coeffs[N - k] = w;
    total += w;
  }
  for (double& c : gf.coeffs) c /= total;
  return gf;
}

double cannibal_ratio(int N, double kappa) {
  if (N < 1) throw std::invalid_argument("cannibal_ratio: N must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("cannibal_ratio: kappa must be > 0");
  if (std::abs(kappa - 1.0) <= 1e-9) return 1.0;  // symmetric limit
  const double kn = std::pow(kappa, N);
  const double dlnf = ((N - 1) * kn - N * kn / kappa + 1.0) /
                      ((1.0 - kappa) * (1.0 - kn));
  return (kappa + kappa * kappa * dlnf) / (N - kappa * dlnf);
}

Eigen::MatrixXd truncated_lvm_generator(int N, TruncatedLvmVariant variant) {
  if (N < 1) throw std::invalid_argument("truncated_lvm_generator: N must be >= 1");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int j = 0; j < N; ++j) {
    // Column j holds u^{N-j} v^j; one predation event moves it to
    // u^{N-j-1} v^{j+1}.
    const double w = variant == TruncatedLvmVariant::Exact
                         ? static_cast<double>(N - j) * (j + 1)
                         : static_cast<double>(N - j) * j;
    L(j, j) = -w;
    L(j + 1, j) = w;
  }
  return L;
}

PolynomialGF evolve_coefficients(const Eigen::MatrixXd& L, const PolynomialGF& A0,
                                 double t) {
  if (t < 0.0) throw std::invalid_argument("evolve_coefficients: t must be >= 0");
  if (L.rows() != A0.degree + 1)
    throw std::invalid_argument("evolve_coefficients: size mismatch");
  if (std::abs(A0.sum() - 1.0) > 1e-8)
    throw std::invalid_argument("evolve_coefficients: coefficients must sum to 1");
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(A0.coeffs.data(),
                                                        A0.coeffs.size());
  const Eigen::VectorXd y = expm(L * t) * x;
  PolynomialGF out;
  out.degree = A0.degree;
  out.coeffs.assign(y.data(), y.data() + y.size());
  return out;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
  // Pade order 13 with scaling and squaring.
  static const double b[14] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};
  const double theta13 = 5.371920351148152;
  const int n = static_cast<int>(A.rows());
  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Eigen::MatrixXd As = A / std::pow(2.0, squarings);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = As * As;
  const Eigen::MatrixXd A4 = A2 * A2;
  const Eigen::MatrixXd A6 = A2 * A4;
  const Eigen::MatrixXd U =
      As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
            b[3] * A2 + b[1] * I);
  const Eigen::MatrixXd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                            b[4] * A4 + b[2] * A2 + b[0] * I;
  Eigen::MatrixXd F = (V - U).partialPivLu().solve(V + U);
  for (int s = 0; s < squarings; ++s) F = F * F;
  return F;
}

}  // namespace occnum
