#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "occnum/model.hpp"

namespace occnum {

using ComplexState = std::vector<std::complex<double>>;

// Polynomial vector field in the occupations: sum of coeff * prod n_j^e_j.
struct DriftTerm {
  double coeff = 0.0;
  std::vector<int> exps;
};
struct DriftPolynomial {
  std::vector<DriftTerm> terms;
  double eval(std::span<const double> n) const;
};

// Leading-order deterministic drift of each mode: every jump contributes
// d_i * 2 lambda^2 * prod_j n_j^{p_j+q_j}. This is the large-n limit of the
// exact conditional drift (which keeps the full falling factorials).
std::vector<DriftPolynomial> meanfield_rhs(const ModelSpec& spec);

struct TrajectoryPoint {
  double t = 0.0;
  std::vector<double> n;
};

// Adaptive Dormand-Prince integration of the mean-field flow, relative
// tolerance 1e-9. Returns `samples` points evenly spaced over [0, t_final]
// (including both ends). Throws NumericError when any component exceeds
// 1e12 (blow-up).
std::vector<TrajectoryPoint> integrate_meanfield(const ModelSpec& spec,
                                                 std::span<const double> n0,
                                                 double t_final, int samples = 101);

// Polynomial in complex coordinates z_i and their conjugates; supports the
// Wirtinger derivative d/d(conj z_i) needed by the decomposition check.
struct ComplexMonomial {
  double coeff = 0.0;
  std::vector<int> z_pow;
  std::vector<int> zbar_pow;
};
struct ComplexPolynomial {
  std::vector<ComplexMonomial> terms;

  std::complex<double> eval(const ComplexState& z) const;
  ComplexPolynomial conjugate() const;
  ComplexPolynomial d_dzbar(int mode) const;
};

// Classical functions of the decomposition
//   dz_i/dt = -i dH/d(conj z_i)
//             + sum_a [conj(R_a) dR_a/d(conj z_i) - R_a d(conj R_a)/d(conj z_i)]
// read off a model spec: R_a = lambda_a prod_j z_j^{p_j} conj(z_j)^{q_j} and
// H = sum_i omega_i conj(z_i) z_i.
ComplexPolynomial jump_function(const ModelSpec& spec, std::size_t jump);
ComplexPolynomial hamiltonian_function(const ModelSpec& spec);

// Right-hand side of the decomposition for every mode at a point.
ComplexState decomposition_rhs(const ModelSpec& spec, const ComplexState& z);

// Direct complex-form vector fields of the built-in models:
//   oscillator: -i w z + mu z - 2 z |z|^2
//   lvm:        (l1^2 z1 - z1 |z2|^2, -l2^2 z2 + z2 |z1|^2)
//   cannibal:   ((l2^2 - l1^2) z1 |z2|^2, (l1^2 - l2^2) z2 |z1|^2)
ComplexState direct_rhs(BuiltinModel model, const std::vector<double>& params,
                        const ComplexState& z);

// Max |decomposition - direct| over points and components; a machine-
// precision identity for the built-in operator sets. The spec argument lets
// tests perturb an operator and watch the defect grow.
double faq_residual_for(const ModelSpec& spec, BuiltinModel model,
                        const std::vector<double>& params,
                        std::span<const ComplexState> points);
double faq_residual(BuiltinModel model, const std::vector<double>& params,
                    std::span<const ComplexState> points);

// Deterministic evaluation points with |z_i| <= max_abs.
std::vector<ComplexState> random_complex_points(int modes, int count, double max_abs,
                                                std::uint64_t seed);

}  // namespace occnum
