#include "occnum/ssa.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

#include "occnum/generator.hpp"

namespace occnum {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream RngStream::from(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t init = seed;
  std::uint64_t mixed = splitmix64(init) ^ (stream * 0xD2B74407B1CE6E93ull);
  RngStream r;
  for (auto& word : r.s) word = splitmix64(mixed);
  return r;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double RngStream::next_open01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

void run_trajectory(const ModelSpec& spec, const std::vector<std::vector<int>>& disp,
                    const OccState& init, double t_final, RngStream& rng,
                    OccState& state, std::vector<double>& rates) {
  state = init;
  double now = 0.0;
  while (true) {
    double total = 0.0;
    for (std::size_t a = 0; a < spec.jumps.size(); ++a) {
      rates[a] = jump_rate(spec.jumps[a], state);
      total += rates[a];
    }
    if (total <= 0.0) return;  // absorbing: wait out the clock
    now += -std::log(rng.next_open01()) / total;
    if (now > t_final) return;
    const double r = rng.next_open01() * total;
    double cum = 0.0;
    std::size_t pick = spec.jumps.size() - 1;
    for (std::size_t a = 0; a < spec.jumps.size(); ++a) {
      cum += rates[a];
      if (r <= cum) {
        pick = a;
        break;
      }
    }
    // Guard against rounding picking a zero-rate jump at the tail.
    while (rates[pick] == 0.0 && pick > 0) --pick;
    for (std::size_t i = 0; i < state.size(); ++i) state[i] += disp[pick][i];
  }
}

void validate_args(const ModelSpec& spec, const OccState& init, double t,
                   std::uint64_t count) {
  if (static_cast<int>(init.size()) != spec.mode_count())
    throw std::invalid_argument("sample_trajectories: init length mismatch");
  for (int n : init)
    if (n < 0) throw std::invalid_argument("sample_trajectories: negative occupancy");
  if (t < 0.0 || !std::isfinite(t))
    throw std::invalid_argument("sample_trajectories: t must be >= 0");
  if (count < 1) throw std::invalid_argument("sample_trajectories: count must be >= 1");
}

}  // namespace

EmpiricalDistribution sample_trajectories(const ModelSpec& spec, const OccState& init,
                                          double t, std::uint64_t count,
                                          std::uint64_t seed, int n_threads) {
  validate_args(spec, init, t, count);
  const int nt = resolve_thread_count(n_threads);
  std::vector<std::vector<int>> disp;
  for (const auto& op : spec.jumps) disp.push_back(op.displacement());

  std::vector<std::map<OccState, std::uint64_t>> partial(nt);
#pragma omp parallel num_threads(nt)
  {
    const int tid = omp_get_thread_num();
    OccState state;
    std::vector<double> rates(spec.jumps.size());
    auto& local = partial[tid];
#pragma omp for schedule(static)
    for (long long k = 0; k < static_cast<long long>(count); ++k) {
      RngStream rng = RngStream::from(seed, static_cast<std::uint64_t>(k));
      run_trajectory(spec, disp, init, t, rng, state, rates);
      ++local[state];
    }
  }

  EmpiricalDistribution emp;
  emp.modes = spec.mode_count();
  emp.trajectories = count;
  emp.seed = seed;
  for (auto& local : partial)
    for (auto& [state, c] : local) emp.counts[state] += c;
  return emp;
}

EmpiricalDistribution sample_trajectories_serial(const ModelSpec& spec,
                                                 const OccState& init, double t,
                                                 std::uint64_t count,
                                                 std::uint64_t seed) {
  validate_args(spec, init, t, count);
  std::vector<std::vector<int>> disp;
  for (const auto& op : spec.jumps) disp.push_back(op.displacement());

  EmpiricalDistribution emp;
  emp.modes = spec.mode_count();
  emp.trajectories = count;
  emp.seed = seed;
  OccState state;
  std::vector<double> rates(spec.jumps.size());
  for (std::uint64_t k = 0; k < count; ++k) {
    RngStream rng = RngStream::from(seed, k);
    run_trajectory(spec, disp, init, t, rng, state, rates);
    ++emp.counts[state];
  }
  return emp;
}

double tv_distance(const EmpiricalDistribution& emp, const DiagonalDistribution& exact) {
  if (emp.modes != exact.lattice->mode_count())
    throw std::invalid_argument("tv_distance: mode count mismatch");
  const double total = static_cast<double>(emp.trajectories);
  std::vector<char> seen(exact.p.size(), 0);
  double sum = 0.0;
  for (const auto& [state, c] : emp.counts) {
    const long long idx = exact.lattice->index_of(state);
    const double q = idx >= 0 ? exact.p[idx] : 0.0;
    if (idx >= 0) seen[idx] = 1;
    sum += std::abs(static_cast<double>(c) / total - q);
  }
  for (std::size_t i = 0; i < exact.p.size(); ++i)
    if (!seen[i]) sum += exact.p[i];
  return 0.5 * sum;
}

}  // namespace occnum
