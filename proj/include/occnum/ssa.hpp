#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "occnum/model.hpp"
#include "occnum/solver.hpp"

namespace occnum {

// Per-trajectory random stream: xoshiro256** seeded through a splitmix64
// mix of (seed, trajectory index), so results never depend on how
// trajectories are scheduled across workers.
struct RngStream {
  std::uint64_t s[4];

  static RngStream from(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  double next_open01();  // uniform in (0,1), never 0
};

// Occupancy histogram of trajectory endpoints on the untruncated state
// space (SSA is not subject to lattice caps).
struct EmpiricalDistribution {
  int modes = 0;
  std::uint64_t trajectories = 0;
  std::uint64_t seed = 0;
  std::map<OccState, std::uint64_t> counts;
};

// Gillespie direct method: exponential waiting times, jump selection
// proportional to rates, endpoint recorded at time t. Deterministic for a
// fixed (spec, init, t, count, seed) for any worker count. Absorbing states
// simply wait out the clock.
EmpiricalDistribution sample_trajectories(const ModelSpec& spec, const OccState& init,
                                          double t, std::uint64_t count,
                                          std::uint64_t seed, int n_threads = 0);

// Plain sequential loop kept as the reference the parallel path must match
// bitwise.
EmpiricalDistribution sample_trajectories_serial(const ModelSpec& spec,
                                                 const OccState& init, double t,
                                                 std::uint64_t count,
                                                 std::uint64_t seed);

// 1/2 sum |p_hat - p| over the union support; empirical states outside the
// exact lattice count in full.
double tv_distance(const EmpiricalDistribution& emp, const DiagonalDistribution& exact);

}  // namespace occnum
