#include "occnum/generator.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace occnum {

int resolve_thread_count(int n_threads) {
  if (n_threads > 0) return n_threads;
  if (const char* env = std::getenv("OCCNUM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

double jump_rate(const JumpOperator& op, std::span<const int> state) {
  double w = 2.0 * op.coefficient * op.coefficient;
  for (std::size_t i = 0; i < op.actions.size(); ++i) {
    const auto& act = op.actions[i];
    const int n = state[i];
    if (act.destroy > 0) {
      if (n < act.destroy) return 0.0;
      for (int k = 0; k < act.destroy; ++k) w *= n - k;
    }
    if (act.create > 0)
      for (int k = 1; k <= act.create; ++k) w *= n + k;
  }
  return w;
}

std::vector<int> displacement(const JumpOperator& op) { return op.displacement(); }

std::vector<double> drift_exact(const ModelSpec& spec, std::span<const int> state) {
  std::vector<double> drift(spec.mode_count(), 0.0);
  for (const auto& op : spec.jumps) {
    const double w = jump_rate(op, state);
    if (w == 0.0) continue;
    const auto d = op.displacement();
    for (int i = 0; i < spec.mode_count(); ++i) drift[i] += w * d[i];
  }
  return drift;
}

double SparseGenerator::max_diag_magnitude() const {
  double m = 0.0;
  for (int r = 0; r < dim; ++r)
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      if (col[k] == r) m = std::max(m, std::abs(val[k]));
  return m;
}

double SparseGenerator::entry(int row, int column) const {
  const auto begin = col.begin() + row_ptr[row];
  const auto end = col.begin() + row_ptr[row + 1];
  const auto it = std::lower_bound(begin, end, column);
  if (it == end || *it != column) return 0.0;
  return val[it - col.begin()];
}

std::vector<double> SparseGenerator::column_sums() const {
  std::vector<double> sums(dim, 0.0);
  for (int r = 0; r < dim; ++r)
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) sums[col[k]] += val[k];
  return sums;
}

namespace {

struct RowEntry {
  int col;
  int order;  // jump index, keeps duplicate accumulation order fixed
  double val;
};

// All entries of one generator row (target state): incoming rates from
// source states plus the diagonal outflow of the row's own state.
// Returns entries sorted by column with duplicates merged.
int assemble_row(const ModelSpec& spec, const TruncatedLattice& lattice,
                 const std::vector<std::vector<int>>& disp, long long row,
                 std::vector<RowEntry>& scratch, std::vector<int>& state_buf) {
  const int m = lattice.mode_count();
  const OccState& n = lattice.states[row];
  scratch.clear();

  double outflow = 0.0;
  for (std::size_t a = 0; a < spec.jumps.size(); ++a) {
    const auto& d = disp[a];
    // Gain term: source = n - d.
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      state_buf[i] = n[i] - d[i];
      if (state_buf[i] < 0) ok = false;
    }
    if (ok) {
      const long long src = lattice.index_of(state_buf);
      if (src >= 0) {
        const double w = jump_rate(spec.jumps[a], state_buf);
        if (w > 0.0)
          scratch.push_back({static_cast<int>(src), static_cast<int>(a), w});
      }
    }
    // Loss term: only if the target of this jump stays inside the lattice.
    for (int i = 0; i < m; ++i) state_buf[i] = n[i] + d[i];
    if (lattice.index_of(state_buf) >= 0) outflow += jump_rate(spec.jumps[a], n);
  }
  scratch.push_back({static_cast<int>(row), static_cast<int>(spec.jumps.size()),
                     -outflow});

  std::sort(scratch.begin(), scratch.end(), [](const RowEntry& a, const RowEntry& b) {
    return a.col != b.col ? a.col < b.col : a.order < b.order;
  });
  int out = 0;
  for (std::size_t k = 0; k < scratch.size(); ++k) {
    if (out > 0 && scratch[out - 1].col == scratch[k].col)
      scratch[out - 1].val += scratch[k].val;
    else
      scratch[out++] = scratch[k];
  }
  return out;
}

}  // namespace

SparseGenerator build_generator(const ModelSpec& spec, const TruncatedLattice& lattice,
                                int n_threads) {
  const long long S = static_cast<long long>(lattice.size());
  const int nt = resolve_thread_count(n_threads);
  std::vector<std::vector<int>> disp;
  for (const auto& op : spec.jumps) disp.push_back(op.displacement());

  SparseGenerator gen;
  gen.dim = static_cast<int>(S);
  gen.row_ptr.assign(S + 1, 0);

  // Pass 1: merged entry count per row.
#pragma omp parallel num_threads(nt)
  {
    std::vector<RowEntry> scratch;
    std::vector<int> buf(lattice.mode_count());
#pragma omp for schedule(static)
    for (long long r = 0; r < S; ++r)
      gen.row_ptr[r + 1] = assemble_row(spec, lattice, disp, r, scratch, buf);
  }
  for (long long r = 0; r < S; ++r) gen.row_ptr[r + 1] += gen.row_ptr[r];
  gen.col.resize(gen.row_ptr[S]);
  gen.val.resize(gen.row_ptr[S]);

  // Pass 2: fill rows.
  double max_entry = 0.0;
#pragma omp parallel num_threads(nt) reduction(max : max_entry)
  {
    std::vector<RowEntry> scratch;
    std::vector<int> buf(lattice.mode_count());
#pragma omp for schedule(static)
    for (long long r = 0; r < S; ++r) {
      const int count = assemble_row(spec, lattice, disp, r, scratch, buf);
      std::int64_t at = gen.row_ptr[r];
      for (int k = 0; k < count; ++k, ++at) {
        gen.col[at] = scratch[k].col;
        gen.val[at] = scratch[k].val;
        max_entry = std::max(max_entry, std::abs(scratch[k].val));
      }
    }
  }
  gen.max_abs_entry = max_entry;
  return gen;
}

SparseGenerator build_generator_serial(const ModelSpec& spec,
                                       const TruncatedLattice& lattice) {
  const long long S = static_cast<long long>(lattice.size());
  const int m = lattice.mode_count();
  std::vector<std::vector<int>> disp;
  for (const auto& op : spec.jumps) disp.push_back(op.displacement());

  struct Triplet {
    int row, col, order;
    double val;
  };
  std::vector<Triplet> trip;
  std::vector<int> buf(m);
  for (long long src = 0; src < S; ++src) {
    const OccState& n = lattice.states[src];
    double outflow = 0.0;
    for (std::size_t a = 0; a < spec.jumps.size(); ++a) {
      for (int i = 0; i < m; ++i) buf[i] = n[i] + disp[a][i];
      const long long tgt = lattice.index_of(buf);
      if (tgt < 0) continue;  // reflecting truncation: drop jump and loss
      const double w = jump_rate(spec.jumps[a], n);
      if (w == 0.0) continue;
      trip.push_back({static_cast<int>(tgt), static_cast<int>(src),
                      static_cast<int>(a), w});
      outflow += w;
    }
    trip.push_back({static_cast<int>(src), static_cast<int>(src),
                    static_cast<int>(spec.jumps.size()), -outflow});
  }
  std::stable_sort(trip.begin(), trip.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.order < b.order;
  });

  SparseGenerator gen;
  gen.dim = static_cast<int>(S);
  gen.row_ptr.assign(S + 1, 0);
  for (std::size_t k = 0; k < trip.size(); ++k) {
    if (k > 0 && trip[k - 1].row == trip[k].row && trip[k - 1].col == trip[k].col) {
      gen.val.back() += trip[k].val;
      continue;
    }
    gen.col.push_back(trip[k].col);
    gen.val.push_back(trip[k].val);
    ++gen.row_ptr[trip[k].row + 1];
  }
  for (long long r = 0; r < S; ++r) gen.row_ptr[r + 1] += gen.row_ptr[r];
  for (double v : gen.val) gen.max_abs_entry = std::max(gen.max_abs_entry, std::abs(v));
  return gen;
}

void spmv(const SparseGenerator& gen, std::span<const double> x, std::span<double> y,
          int n_threads) {
  const int nt = resolve_thread_count(n_threads);
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int r = 0; r < gen.dim; ++r) {
    double acc = 0.0;
    for (std::int64_t k = gen.row_ptr[r]; k < gen.row_ptr[r + 1]; ++k)
      acc += gen.val[k] * x[gen.col[k]];
    y[r] = acc;
  }
}

void spmv_serial(const SparseGenerator& gen, std::span<const double> x,
                 std::span<double> y) {
  for (int r = 0; r < gen.dim; ++r) {
    double acc = 0.0;
    for (std::int64_t k = gen.row_ptr[r]; k < gen.row_ptr[r + 1]; ++k)
      acc += gen.val[k] * x[gen.col[k]];
    y[r] = acc;
  }
}

void dump_triplets(std::ostream& out, const SparseGenerator& gen) {
  char buf[96];
  for (int r = 0; r < gen.dim; ++r)
    for (std::int64_t k = gen.row_ptr[r]; k < gen.row_ptr[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, gen.col[k], gen.val[k]);
      out << buf;
    }
}

}  // namespace occnum
