#pragma once

#include <memory>
#include <span>
#include <vector>

#include "occnum/generator.hpp"
#include "occnum/lattice.hpp"

namespace occnum {

// Probability vector over the states of a truncated lattice.
struct DiagonalDistribution {
  std::shared_ptr<const TruncatedLattice> lattice;
  std::vector<double> p;

  std::size_t size() const { return p.size(); }
};

DiagonalDistribution point_mass(std::shared_ptr<const TruncatedLattice> lattice,
                                std::span<const int> state);

struct MomentSet {
  std::vector<double> mean;
  std::vector<std::vector<double>> second;  // raw second moments E[n_i n_j]
  std::vector<double> variance;
  std::vector<double> rel_fluct;  // sqrt(var)/mean; NaN when mean == 0
};

enum class StationaryMethod { Auto, SparseLu, PowerIteration };

// Stationary solution of Q p = 0 with sum(p) = 1. Up to ~2e4 states one
// balance row is replaced by the normalization row and the system is
// LU-solved (sparse LU plus iterative refinement); above that, damped
// power iteration on the uniformized operator avoids LU fill-in. Residual
// guarantee either way: ||Q p||_inf <= 1e-10 * max|Q|. Throws NumericError
// when the chain has more than one closed communicating class (the message
// lists the class decomposition) or when iteration stalls.
DiagonalDistribution stationary(const SparseGenerator& gen,
                                std::shared_ptr<const TruncatedLattice> lattice,
                                StationaryMethod method = StationaryMethod::Auto);

// Transient solution by uniformization: e^{Qt} p0 through a Poisson mixture
// of powers of P = I + Q/Lambda, truncated to leave <= 1e-12 of the weight
// mass. Positivity and normalization hold by construction.
DiagonalDistribution evolve(const SparseGenerator& gen, const DiagonalDistribution& p0,
                            double t, int n_threads = 0);

MomentSet moments(const DiagonalDistribution& dist);

// G(u) = sum_n p_n prod_i u_i^{n_i}.
double gf_eval(const DiagonalDistribution& dist, std::span<const double> u);

// Max over u_points of |(1+u) G'' - mu u G' - mu G| for a single-mode
// distribution; derivatives are exact factorial-weighted sums. Vanishes on
// the oscillator stationary state up to truncation and solver residual.
double gf_ode_residual(const DiagonalDistribution& dist, double mu,
                       std::span<const double> u_points);

// Stationary moment identities of the two-mode birth/death/predation
// model. Both residuals vanish on a stationary solution:
//   r_a = l1^2 (1 + E n1) - E n1 - E n1 n2
//   r_b = -l2^2 E n2 + E n1 + E n1 n2
// ratio_lhs/ratio_rhs report E n2 / (1 + E n1) against l1^2 / l2^2.
struct MomentIdentityResiduals {
  double r_a = 0.0;
  double r_b = 0.0;
  double ratio_lhs = 0.0;
  double ratio_rhs = 0.0;
};
MomentIdentityResiduals moment_identity_residuals(const DiagonalDistribution& dist,
                                                  double l1, double l2);

// Probability sitting on states with at least one dropped outgoing
// transition; gauges how much the truncation distorts the solve.
double boundary_tail_mass(const ModelSpec& spec, const DiagonalDistribution& dist);

// Largest relative detailed-balance violation
// |p_m W(m->n) - p_n W(n->m)| / max flux over off-diagonal pairs.
double detailed_balance_residual(const SparseGenerator& gen,
                                 const DiagonalDistribution& dist);

// Total variation distance between distributions on the same lattice.
double tv_exact(const DiagonalDistribution& a, const DiagonalDistribution& b);

// Closed communicating classes of the transition graph (each sorted).
std::vector<std::vector<int>> closed_classes(const SparseGenerator& gen);

}  // namespace occnum
