#include <doctest.h>

#include <cmath>
#include <memory>

#include "occnum/ssa.hpp"

using namespace occnum;

namespace {

DiagonalDistribution exact_transient(const ModelSpec& spec, const OccState& init,
                                     double t, std::vector<int> caps,
                                     std::optional<ManifoldConstraint> manifold = {}) {
  auto lattice = std::make_shared<const TruncatedLattice>(
      enumerate_states(spec, std::move(caps), std::move(manifold)));
  const auto gen = build_generator(spec, *lattice);
  return evolve(gen, point_mass(lattice, init), t);
}

}  // namespace

TEST_CASE("t=0 leaves all mass at the initial state") {
  const auto spec = builtin_model(BuiltinModel::Cannibal, {1.0, 1.0});
  const auto emp = sample_trajectories(spec, {3, 1}, 0.0, 500, 99);
  REQUIRE(emp.counts.size() == 1);
  CHECK(emp.counts.at(OccState{3, 1}) == 500);
}

TEST_CASE("histogram counts always sum to the trajectory count") {
  const auto spec = builtin_model(BuiltinModel::LotkaVolterra, {0.8, 1.1});
  const auto emp = sample_trajectories(spec, {2, 2}, 0.4, 2000, 7);
  std::uint64_t total = 0;
  for (const auto& [state, c] : emp.counts) total += c;
  CHECK(total == emp.trajectories);
}

TEST_CASE("identical seeds give bitwise identical histograms for any worker count") {
  const auto spec = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  const auto ref = sample_trajectories_serial(spec, {2, 0}, 0.5, 20000, 42);
  for (int nt : {1, 2, 3}) {
    const auto par = sample_trajectories(spec, {2, 0}, 0.5, 20000, 42, nt);
    CHECK(par.counts == ref.counts);
  }
  // and a different seed gives a different draw
  const auto other = sample_trajectories(spec, {2, 0}, 0.5, 20000, 43);
  CHECK(other.counts != ref.counts);
}

TEST_CASE("conserved totals hold along every trajectory") {
  const auto spec = builtin_model(BuiltinModel::Cannibal, {1.2, 0.7});
  const auto emp = sample_trajectories(spec, {4, 2}, 1.5, 5000, 11);
  for (const auto& [state, c] : emp.counts) CHECK(state[0] + state[1] == 6);
}

TEST_CASE("absorbing states wait out the clock") {
  const auto spec = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  // (0, N) is absorbing: no jump can fire.
  const auto emp = sample_trajectories(spec, {0, 3}, 5.0, 100, 3);
  REQUIRE(emp.counts.size() == 1);
  CHECK(emp.counts.at(OccState{0, 3}) == 100);
}

TEST_CASE("predation chain ends in the all-predator state at large t") {
  const auto spec = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  for (std::uint64_t seed : {1ull, 2024ull}) {
    const auto emp = sample_trajectories(spec, {2, 0}, 50.0, 3000, seed);
    REQUIRE(emp.counts.size() == 1);
    CHECK(emp.counts.at(OccState{0, 2}) == 3000);
  }
}

TEST_CASE("tv_distance basics") {
  const auto spec = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  auto lattice = std::make_shared<const TruncatedLattice>(
      enumerate_states(spec, {2, 2}, ManifoldConstraint{{1, 1}, 2}));
  const auto exact = point_mass(lattice, OccState{1, 1});

  EmpiricalDistribution same{2, 10, 0, {{OccState{1, 1}, 10}}};
  CHECK(tv_distance(same, exact) == 0.0);

  EmpiricalDistribution disjoint{2, 10, 0, {{OccState{2, 0}, 10}}};
  CHECK(tv_distance(disjoint, exact) == 1.0);

  // mass outside the lattice counts in full
  EmpiricalDistribution outside{2, 10, 0, {{OccState{9, 9}, 10}}};
  CHECK(tv_distance(outside, exact) == 1.0);
}

TEST_CASE("empirical law converges to the exact transient") {
  const auto spec = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  const double t = 0.5;  // coefficient-time 1
  const auto exact = exact_transient(spec, {2, 0}, t, {2, 2}, ManifoldConstraint{{1, 1}, 2});
  const auto small = sample_trajectories(spec, {2, 0}, t, 1000, 31);
  const auto large = sample_trajectories(spec, {2, 0}, t, 100000, 31);
  const double tv_small = tv_distance(small, exact);
  const double tv_large = tv_distance(large, exact);
  CHECK(tv_large < tv_small);
  CHECK(tv_large <= 0.02);
}

TEST_CASE("two-kin sampling reaches the detailed-balance stationary law") {
  // a=1, b=2: stationary p = (4/7, 2/7, 1/7) over n1 = 0,1,2.
  const auto spec = builtin_model(BuiltinModel::Cannibal, {1.0, std::sqrt(0.5)});
  auto lattice = std::make_shared<const TruncatedLattice>(
      enumerate_states(spec, {2, 2}, ManifoldConstraint{{1, 1}, 2}));
  const auto gen = build_generator(spec, *lattice);
  const auto st = stationary(gen, lattice);
  const auto emp = sample_trajectories(spec, {2, 0}, 50.0, 100000, 17);
  CHECK(tv_distance(emp, st) <= 0.02);
}

TEST_CASE("rng streams are stable and decorrelated") {
  auto a = RngStream::from(1, 0);
  auto b = RngStream::from(1, 1);
  auto c = RngStream::from(2, 0);
  const auto x = a.next_u64();
  CHECK(x != b.next_u64());
  CHECK(x != c.next_u64());
  auto a2 = RngStream::from(1, 0);
  CHECK(a2.next_u64() == x);
  for (int k = 0; k < 10000; ++k) {
    const double u = a.next_open01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}
