#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "occnum/lattice.hpp"
#include "occnum/model.hpp"

namespace occnum {

// Transition rate of one jump out of a state:
//   W = 2 * lambda^2 * prod_j f_j,
// f_j = n_j (n_j-1) ... (n_j-p_j+1) for destroy(p_j) and
// f_j = (n_j+1)(n_j+2) ... (n_j+q_j) for create(q_j).
// Zero when a destroy factor exceeds the occupancy.
double jump_rate(const JumpOperator& op, std::span<const int> state);

std::vector<int> displacement(const JumpOperator& op);

// Exact conditional mean velocity sum_a W_a(n) * d_a; no truncation.
std::vector<double> drift_exact(const ModelSpec& spec, std::span<const int> state);

// Master-equation generator in compressed sparse rows, acting on
// probability column vectors: dp/dt = Q p. Row = target state, column =
// source state; entry (n,m) is the rate m -> n, the diagonal holds minus
// the total outflow. Column sums vanish up to rounding. Transitions that
// would leave the lattice are dropped together with their loss terms, so
// the truncated generator stays a proper stochastic generator.
struct SparseGenerator {
  int dim = 0;
  std::vector<std::int64_t> row_ptr;  // size dim+1
  std::vector<int> col;
  std::vector<double> val;
  double max_abs_entry = 0.0;

  // Magnitude of the largest diagonal (uniformization rate).
  double max_diag_magnitude() const;
  // Entry (row, col) or 0 when absent; rows are sorted by column.
  double entry(int row, int column) const;
  std::vector<double> column_sums() const;
};

// OpenMP row-parallel assembly. Output is identical for any worker count.
// n_threads <= 0 picks OCCNUM_THREADS or the OpenMP default.
SparseGenerator build_generator(const ModelSpec& spec, const TruncatedLattice& lattice,
                                int n_threads = 0);

// Straightforward triplet-and-sort reference; kept for testing the
// parallel assembly against.
SparseGenerator build_generator_serial(const ModelSpec& spec,
                                       const TruncatedLattice& lattice);

// y = Q x, row-parallel; bitwise identical for any worker count.
void spmv(const SparseGenerator& gen, std::span<const double> x, std::span<double> y,
          int n_threads = 0);
void spmv_serial(const SparseGenerator& gen, std::span<const double> x,
                 std::span<double> y);

// Text dump, one `row col rate` triplet per line (17 significant digits).
void dump_triplets(std::ostream& out, const SparseGenerator& gen);

// Worker count actually used for n_threads <= 0 (OCCNUM_THREADS cap).
int resolve_thread_count(int n_threads);

}  // namespace occnum
