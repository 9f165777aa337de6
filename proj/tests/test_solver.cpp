#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <random>

#include "occnum/analytic.hpp"
#include "occnum/errors.hpp"
#include "occnum/solver.hpp"

using namespace occnum;

namespace {

struct Compiled {
  ModelSpec spec;
  std::shared_ptr<const TruncatedLattice> lattice;
  SparseGenerator gen;
};

Compiled compile(ModelSpec spec, std::vector<int> caps,
                 std::optional<ManifoldConstraint> manifold = {}) {
  auto lattice = std::make_shared<const TruncatedLattice>(
      enumerate_states(spec, std::move(caps), std::move(manifold)));
  auto gen = build_generator(spec, *lattice);
  return {std::move(spec), std::move(lattice), std::move(gen)};
}

Compiled compile_cannibal_manifold(double l1, double l2, int N) {
  auto spec = builtin_model(BuiltinModel::Cannibal, {l1, l2});
  return compile(std::move(spec), {N, N}, ManifoldConstraint{{1, 1}, N});
}

}  // namespace

TEST_CASE("symmetric two-kin manifold is uniform") {
  const auto c = compile_cannibal_manifold(1.0, 1.0, 2);
  const auto dist = stationary(c.gen, c.lattice);
  for (double p : dist.p) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("two-kin manifold matches the detailed-balance hand chain") {
  // a = 2 l2^2 = 1, b = 2 l1^2 = 2: successive-state ratio a/b = 1/2, so
  // p over n1 = 0,1,2 is (4/7, 2/7, 1/7).
  const auto c = compile_cannibal_manifold(1.0, std::sqrt(0.5), 2);
  const auto dist = stationary(c.gen, c.lattice);
  CHECK(dist.p[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(dist.p[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(dist.p[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(detailed_balance_residual(c.gen, dist) <= 1e-10);
  const auto mom = moments(dist);
  CHECK(std::abs(mom.mean[0] - 4.0 / 7.0) <= 1e-10);
  CHECK(std::abs(mom.mean[1] - 10.0 / 7.0) <= 1e-10);
}

TEST_CASE("oscillator stationary at mu=50 sits near (mu+1)/2") {
  const auto c = compile(builtin_model(BuiltinModel::Oscillator, {50.0}),
                         default_caps(BuiltinModel::Oscillator, {50.0}));
  CHECK(c.lattice->caps[0] == 130);
  const auto dist = stationary(c.gen, c.lattice);
  const auto mom = moments(dist);
  CHECK(std::abs(mom.mean[0] / 25.5 - 1.0) <= 0.02);
  CHECK(std::abs(mom.variance[0] / 37.75 - 1.0) <= 0.05);
  // solver vs Phi-series moments: same math through different routes
  const auto phi = oscillator_moments(50.0);
  CHECK(std::abs(mom.mean[0] / phi.mean - 1.0) <= 1e-6);
  CHECK(std::abs(mom.variance[0] / phi.variance - 1.0) <= 1e-6);
}

TEST_CASE("stationary residual obeys the advertised bound") {
  for (double mu : {0.01, 1.0, 50.0}) {
    const auto c = compile(builtin_model(BuiltinModel::Oscillator, {mu}),
                           default_caps(BuiltinModel::Oscillator, {mu}));
    const auto dist = stationary(c.gen, c.lattice);
    std::vector<double> r(c.gen.dim);
    spmv_serial(c.gen, dist.p, r);
    double rmax = 0.0;
    for (double v : r) rmax = std::max(rmax, std::abs(v));
    CHECK(rmax <= 1e-10 * c.gen.max_abs_entry);
    for (double p : dist.p) CHECK(p >= 0.0);
  }
}

TEST_CASE("multiple ergodic classes are reported with their decomposition") {
  // Box lattice of the conserving model: one closed class per diagonal.
  const auto c = compile(builtin_model(BuiltinModel::Cannibal, {1.0, 1.0}), {2, 2});
  CHECK(closed_classes(c.gen).size() == 5);
  try {
    (void)stationary(c.gen, c.lattice);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("5 ergodic classes") != std::string::npos);
    CHECK(std::string(e.what()).find("(0,0)") != std::string::npos);
  }
}

TEST_CASE("absorbing chain still has a unique stationary point") {
  const auto trunc = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  const auto c = compile(trunc, {2, 2}, ManifoldConstraint{{1, 1}, 2});
  const auto dist = stationary(c.gen, c.lattice);
  CHECK(dist.p[c.lattice->index_of(OccState{0, 2})] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evolve: identity at t=0 and agreement with a dense exponential") {
  const auto c = compile_cannibal_manifold(0.8, 1.1, 3);
  const auto p0 = point_mass(c.lattice, OccState{3, 0});
  const auto same = evolve(c.gen, p0, 0.0);
  CHECK(same.p == p0.p);

  // Dense-exponential oracle on the 4-state manifold.
  const int S = c.gen.dim;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(S, S);
  for (int r = 0; r < S; ++r)
    for (std::int64_t k = c.gen.row_ptr[r]; k < c.gen.row_ptr[r + 1]; ++k)
      Q(r, c.gen.col[k]) = c.gen.val[k];
  for (double t : {0.05, 0.3, 1.0, 4.0}) {
    const Eigen::VectorXd pe =
        expm(Q * t) * Eigen::Map<const Eigen::VectorXd>(p0.p.data(), S);
    const auto pu = evolve(c.gen, p0, t);
    for (int i = 0; i < S; ++i) CHECK(std::abs(pu.p[i] - pe[i]) <= 1e-12);
  }
}

TEST_CASE("predation manifold drains into the all-predator state") {
  const auto trunc = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  const auto c = compile(trunc, {2, 2}, ManifoldConstraint{{1, 1}, 2});
  const auto p0 = point_mass(c.lattice, OccState{2, 0});
  const auto pt = evolve(c.gen, p0, 10.0);  // coefficient-time 20
  const auto mom = moments(pt);
  CHECK(std::abs(mom.mean[0]) <= 1e-8);
  CHECK(std::abs(mom.mean[1] - 2.0) <= 1e-8);
}

TEST_CASE("evolve conserves mass, positivity and the semigroup property") {
  const auto c = compile_cannibal_manifold(1.0, 0.7, 4);
  const auto p0 = point_mass(c.lattice, OccState{2, 2});
  const auto a = evolve(c.gen, evolve(c.gen, p0, 0.7), 1.3);
  const auto b = evolve(c.gen, p0, 2.0);
  CHECK(tv_exact(a, b) <= 1e-9);
  for (const auto& dist : {a, b}) {
    double sum = 0.0;
    for (double p : dist.p) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(evolve(c.gen, p0, -1.0), std::invalid_argument);
}

TEST_CASE("moments of a point mass") {
  const auto c = compile(builtin_model(BuiltinModel::LotkaVolterra, {1.0, 1.0}), {8, 8});
  const auto dist = point_mass(c.lattice, OccState{3, 5});
  const auto mom = moments(dist);
  CHECK(mom.mean == std::vector<double>{3.0, 5.0});
  CHECK(mom.variance[0] == 0.0);
  CHECK(mom.variance[1] == 0.0);
  CHECK(mom.second[0][1] == 15.0);
  CHECK(mom.rel_fluct[0] == 0.0);
}

TEST_CASE("oscillator stationary moments at small mu") {
  const auto c = compile(builtin_model(BuiltinModel::Oscillator, {0.01}),
                         default_caps(BuiltinModel::Oscillator, {0.01}));
  const auto mom = moments(stationary(c.gen, c.lattice));
  CHECK(std::abs(mom.mean[0] - 0.3333) <= 0.01);
  CHECK(std::abs(mom.variance[0] - 0.2222) <= 0.01);
}

TEST_CASE("generating function evaluation") {
  const auto c = compile(builtin_model(BuiltinModel::Oscillator, {0.001}),
                         default_caps(BuiltinModel::Oscillator, {0.001}));
  const auto dist = stationary(c.gen, c.lattice);
  // normalization at u = 1
  CHECK(gf_eval(dist, std::vector<double>{1.0}) == doctest::Approx(1.0).epsilon(1e-12));
  // mu -> 0 stationary GF tends to (2+u)/3
  for (double u : {0.0, 0.5, 1.0})
    CHECK(std::abs(gf_eval(dist, std::vector<double>{u}) - (2.0 + u) / 3.0) <= 0.01);
  // point mass at the vacuum has G == 1
  const auto delta = point_mass(c.lattice, OccState{0});
  for (double u : {0.0, 0.3, 0.9})
    CHECK(gf_eval(delta, std::vector<double>{u}) == 1.0);
}

TEST_CASE("oscillator GF solves its stationary differential equation") {
  const std::vector<double> u_points{0.0, 0.5, 1.0};
  for (double mu : {0.01, 1.0, 50.0}) {
    const auto c = compile(builtin_model(BuiltinModel::Oscillator, {mu}),
                           default_caps(BuiltinModel::Oscillator, {mu}));
    const auto dist = stationary(c.gen, c.lattice);
    CHECK(gf_ode_residual(dist, mu, u_points) <= 1e-8);
  }
  // negative control: a random distribution is far from stationary
  const auto c = compile(builtin_model(BuiltinModel::Oscillator, {1.0}),
                         default_caps(BuiltinModel::Oscillator, {1.0}));
  DiagonalDistribution junk{c.lattice, std::vector<double>(c.lattice->size(), 0.0)};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double sum = 0.0;
  for (double& p : junk.p) sum += (p = u01(rng));
  for (double& p : junk.p) p /= sum;
  CHECK(gf_ode_residual(junk, 1.0, u_points) > 1e-4);
  // vacuum point mass at mu=0: both sides vanish identically
  CHECK(gf_ode_residual(point_mass(c.lattice, OccState{0}), 0.0, u_points) == 0.0);
}

TEST_CASE("stationary moment identities in the solvable regime") {
  const double l1 = std::sqrt(2.0), l2 = std::sqrt(3.0);
  const auto c = compile(builtin_model(BuiltinModel::LotkaVolterra, {l1, l2}), {56, 56});
  const auto dist = stationary(c.gen, c.lattice);
  const auto res = moment_identity_residuals(dist, l1, l2);
  CHECK(std::abs(res.r_a) <= 1e-6);
  CHECK(std::abs(res.r_b) <= 1e-6);
  CHECK(std::abs(res.ratio_lhs - res.ratio_rhs) <= 1e-6);
  const auto mom = moments(dist);
  CHECK(std::abs(mom.mean[0] - 2.0) <= 1e-6);
  CHECK(std::abs(mom.mean[1] - 2.0) <= 1e-6);
  CHECK(std::abs(mom.rel_fluct[0] - std::sqrt(1.5)) <= 1e-6);
  // stationary GF equals the product-geometric closed form on a grid
  for (double u : {0.0, 0.5, 1.0})
    for (double v : {0.0, 0.5, 1.0})
      CHECK(std::abs(gf_eval(dist, std::vector<double>{u, v}) -
                     lvm_special_gf(l1, u, v)) <= 1e-6);
}

TEST_CASE("moment identities on the analytic product-geometric distribution") {
  // Truncated-renormalized geometric marginals with kappa = 2/3; at caps 80
  // the dropped tail is ~6e-15 so the identities hold to 1e-10.
  const double l1 = std::sqrt(2.0), l2 = std::sqrt(3.0), kappa = 2.0 / 3.0;
  const auto spec = builtin_model(BuiltinModel::LotkaVolterra, {l1, l2});
  auto lattice = std::make_shared<const TruncatedLattice>(enumerate_states(spec, {80, 80}));
  DiagonalDistribution dist{lattice, std::vector<double>(lattice->size())};
  double sum = 0.0;
  for (std::size_t s = 0; s < lattice->size(); ++s) {
    const auto& n = lattice->states[s];
    sum += (dist.p[s] = std::pow(kappa, n[0] + n[1]));
  }
  for (double& p : dist.p) p /= sum;
  const auto res = moment_identity_residuals(dist, l1, l2);
  CHECK(std::abs(res.r_a) <= 1e-10);
  CHECK(std::abs(res.r_b) <= 1e-10);
}

TEST_CASE("moment identities vanish trivially on the empty point mass") {
  const auto spec = builtin_model(BuiltinModel::LotkaVolterra, {1.0, 1.0});
  auto lattice = std::make_shared<const TruncatedLattice>(enumerate_states(spec, {4, 4}));
  const auto delta = point_mass(lattice, OccState{0, 0});
  const auto res = moment_identity_residuals(delta, 0.0, 1.0);
  CHECK(res.r_a == 0.0);
  CHECK(res.r_b == 0.0);
}

TEST_CASE("moment identities hold for every normalizable stationary solve") {
  // Free property of the compile+solve pipeline: any lambda pair whose
  // truncated solve has negligible boundary mass satisfies both identities.
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> l1sq_dist(0.5, 2.0);
  std::uniform_real_distribution<double> shift(-0.2, 0.6);
  for (int trial = 0; trial < 5; ++trial) {
    const double l1sq = l1sq_dist(rng);
    const double l2sq = 1.0 + l1sq + shift(rng);
    const double l1 = std::sqrt(l1sq), l2 = std::sqrt(l2sq);
    const auto c = compile(builtin_model(BuiltinModel::LotkaVolterra, {l1, l2}), {60, 60});
    const auto dist = stationary(c.gen, c.lattice);
    REQUIRE(boundary_tail_mass(c.spec, dist) < 1e-7);
    const auto res = moment_identity_residuals(dist, l1, l2);
    CHECK(std::abs(res.r_a) <= 1e-5);
    CHECK(std::abs(res.r_b) <= 1e-5);
    CHECK(std::abs(res.ratio_lhs - res.ratio_rhs) <= 1e-5);
  }
}

TEST_CASE("boundary tail mass: positive on tight boxes, zero on manifolds") {
  const auto tight = compile(builtin_model(BuiltinModel::Oscillator, {1.0}), {3});
  const auto d1 = stationary(tight.gen, tight.lattice);
  CHECK(boundary_tail_mass(tight.spec, d1) > 1e-4);

  const auto wide = compile(builtin_model(BuiltinModel::Oscillator, {1.0}),
                            default_caps(BuiltinModel::Oscillator, {1.0}));
  const auto d2 = stationary(wide.gen, wide.lattice);
  CHECK(boundary_tail_mass(wide.spec, d2) < 1e-12);

  const auto manifold = compile_cannibal_manifold(1.0, 0.8, 3);
  const auto d3 = stationary(manifold.gen, manifold.lattice);
  CHECK(boundary_tail_mass(manifold.spec, d3) == 0.0);
}

TEST_CASE("uniformized transient equals the coefficient flow after time rescale") {
  // The compiled manifold generator is 2x the coefficient matrix, so the
  // master-equation law at time t matches the coefficient flow at 2t.
  const int N = 3;
  const auto trunc = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  const auto c = compile(trunc, {N, N}, ManifoldConstraint{{1, 1}, N});
  const auto L = truncated_lvm_generator(N, TruncatedLvmVariant::Exact);
  PolynomialGF A0{N, std::vector<double>(N + 1, 0.0)};
  A0.coeffs[0] = 1.0;  // all mass at u^N, the state (N, 0)
  OccState init(2, 0);
  init[0] = N;
  const auto p0 = point_mass(c.lattice, init);
  for (double t : {0.1, 0.37, 1.4}) {
    const auto law = evolve(c.gen, p0, t);
    const auto coeffs = evolve_coefficients(L, A0, 2.0 * t);
    for (std::size_t s = 0; s < law.p.size(); ++s) {
      const int n1 = c.lattice->states[s][0];
      CHECK(std::abs(law.p[s] - coeffs.coeff_u_pow(n1)) <= 1e-12);
    }
  }
}

TEST_CASE("power iteration agrees with the LU solve") {
  const auto c = compile_cannibal_manifold(1.0, 0.75, 12);
  const auto lu = stationary(c.gen, c.lattice, StationaryMethod::SparseLu);
  const auto power = stationary(c.gen, c.lattice, StationaryMethod::PowerIteration);
  CHECK(tv_exact(lu, power) <= 1e-9);
  // Box lattice of an ergodic model, too. Both methods guarantee the same
  // residual bound ||Q p|| <= 1e-10 max|Q| (asserted inside stationary);
  // through the spectral gap that allows ~1e-7 of state-space spread here.
  const auto osc = compile(builtin_model(BuiltinModel::Oscillator, {2.0}),
                           default_caps(BuiltinModel::Oscillator, {2.0}));
  const auto lu2 = stationary(osc.gen, osc.lattice, StationaryMethod::SparseLu);
  const auto power2 = stationary(osc.gen, osc.lattice, StationaryMethod::PowerIteration);
  CHECK(tv_exact(lu2, power2) <= 1e-6);
}

TEST_CASE("detailed balance on a larger asymmetric two-kin manifold") {
  const auto c = compile_cannibal_manifold(1.3, 0.6, 9);
  const auto dist = stationary(c.gen, c.lattice);
  CHECK(detailed_balance_residual(c.gen, dist) <= 1e-10);
  // closed form: successive ratio is kappa = (l2/l1)^2
  const double kappa = (0.6 * 0.6) / (1.3 * 1.3);
  for (int k = 0; k + 1 <= 9; ++k)
    CHECK(dist.p[k + 1] / dist.p[k] == doctest::Approx(kappa).epsilon(1e-9));
}

TEST_CASE("uniformization handles large Lambda*t and relaxes to stationary") {
  const auto c = compile_cannibal_manifold(1.0, 0.7, 6);
  const auto st = stationary(c.gen, c.lattice);
  const auto p0 = point_mass(c.lattice, OccState{6, 0});
  const auto pt = evolve(c.gen, p0, 150.0);  // Lambda*t in the tens of thousands
  CHECK(tv_exact(pt, st) <= 1e-8);
  double sum = 0.0;
  for (double p : pt.p) sum += p;
  CHECK(std::abs(sum - 1.0) <= 1e-11);
}

TEST_CASE("evolve stays on the conserved manifold exactly") {
  const auto c = compile_cannibal_manifold(0.9, 1.3, 5);
  auto p0 = point_mass(c.lattice, OccState{5, 0});
  const auto pt = evolve(c.gen, p0, 2.0);
  for (std::size_t s = 0; s < pt.p.size(); ++s) {
    const auto& n = c.lattice->states[s];
    CHECK(n[0] + n[1] == 5);  // lattice only holds the manifold
  }
  double sum = 0.0;
  for (double p : pt.p) sum += p;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}
