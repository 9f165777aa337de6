#include "occnum/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "occnum/errors.hpp"

namespace occnum {

DiagonalDistribution point_mass(std::shared_ptr<const TruncatedLattice> lattice,
                                std::span<const int> state) {
  const long long idx = lattice->index_of(state);
  if (idx < 0) throw std::invalid_argument("point_mass: state outside lattice");
  DiagonalDistribution dist;
  dist.lattice = std::move(lattice);
  dist.p.assign(dist.lattice->size(), 0.0);
  dist.p[idx] = 1.0;
  return dist;
}

std::vector<std::vector<int>> closed_classes(const SparseGenerator& gen) {
  const int S = gen.dim;
  // Forward adjacency: edge source -> target for every positive rate.
  std::vector<std::vector<int>> fwd(S), rev(S);
  for (int r = 0; r < S; ++r)
    for (std::int64_t k = gen.row_ptr[r]; k < gen.row_ptr[r + 1]; ++k) {
      const int c = gen.col[k];
      if (c == r || gen.val[k] <= 0.0) continue;
      fwd[c].push_back(r);
      rev[r].push_back(c);
    }

  // Kosaraju: finish order on the forward graph, then components on the
  // reverse graph.
  std::vector<int> order;
  order.reserve(S);
  std::vector<char> seen(S, 0);
  std::vector<std::pair<int, std::size_t>> stack;
  for (int s = 0; s < S; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    stack.push_back({s, 0});
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < fwd[v].size()) {
        const int w = fwd[v][i++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(S, -1);
  int n_comp = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    std::vector<int> dfs{*it};
    comp[*it] = n_comp;
    while (!dfs.empty()) {
      const int v = dfs.back();
      dfs.pop_back();
      for (int w : rev[v])
        if (comp[w] < 0) {
          comp[w] = n_comp;
          dfs.push_back(w);
        }
    }
    ++n_comp;
  }

  std::vector<char> open(n_comp, 0);
  for (int m = 0; m < S; ++m)
    for (int tgt : fwd[m])
      if (comp[tgt] != comp[m]) open[comp[m]] = 1;
  std::vector<std::vector<int>> classes(n_comp);
  for (int s = 0; s < S; ++s)
    if (!open[comp[s]]) classes[comp[s]].push_back(s);
  std::erase_if(classes, [](const std::vector<int>& c) { return c.empty(); });
  for (auto& c : classes) std::sort(c.begin(), c.end());
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return classes;
}

namespace {

std::string state_to_string(const OccState& n) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < n.size(); ++i) out << (i ? "," : "") << n[i];
  out << ")";
  return out.str();
}

}  // namespace

namespace {

std::vector<double> stationary_sparse_lu(const SparseGenerator& gen) {
  const int S = gen.dim;
  // Replace the last balance row by normalization and LU-solve.
  Eigen::SparseMatrix<double> A(S, S);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(gen.val.size() + S);
    for (int r = 0; r + 1 < S; ++r)
      for (std::int64_t k = gen.row_ptr[r]; k < gen.row_ptr[r + 1]; ++k)
        trip.emplace_back(r, gen.col[k], gen.val[k]);
    for (int c = 0; c < S; ++c) trip.emplace_back(S - 1, c, 1.0);
    A.setFromTriplets(trip.begin(), trip.end());
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw NumericError("stationary: singular replaced-row system");

  Eigen::VectorXd b = Eigen::VectorXd::Zero(S);
  b[S - 1] = 1.0;
  Eigen::VectorXd p = lu.solve(b);
  for (int pass = 0; pass < 3; ++pass) {
    Eigen::VectorXd r = b - A * p;
    p += lu.solve(r);
  }
  return {p.data(), p.data() + S};
}

// Damped iteration with the uniformized operator: p <- (p + P p)/2 keeps
// the fixed point, forces aperiodicity, and never materializes fill-in.
std::vector<double> stationary_power(const SparseGenerator& gen, double tol) {
  const int S = gen.dim;
  const double lambda = gen.max_diag_magnitude();
  std::vector<double> p(S, 1.0 / S);
  if (lambda == 0.0) return p;
  SparseGenerator P = gen;
  for (int r = 0; r < P.dim; ++r)
    for (std::int64_t k = P.row_ptr[r]; k < P.row_ptr[r + 1]; ++k) {
      P.val[k] /= lambda;
      if (P.col[k] == r) P.val[k] += 1.0;
    }
  std::vector<double> next(S), residual(S);
  const long max_iters = 2000000;
  for (long it = 1; it <= max_iters; ++it) {
    spmv(P, p, next);
    double sum = 0.0;
    for (int i = 0; i < S; ++i) sum += (next[i] = 0.5 * (next[i] + p[i]));
    for (double& v : next) v /= sum;
    p.swap(next);
    if (it % 64 == 0 || it == max_iters) {
      spmv(gen, p, residual);
      double rmax = 0.0;
      for (double v : residual) rmax = std::max(rmax, std::abs(v));
      if (rmax <= tol) return p;
    }
  }
  throw NumericError("stationary: power iteration did not converge");
}

}  // namespace

DiagonalDistribution stationary(const SparseGenerator& gen,
                                std::shared_ptr<const TruncatedLattice> lattice,
                                StationaryMethod method) {
  const int S = gen.dim;
  const auto classes = closed_classes(gen);
  if (classes.size() != 1) {
    std::ostringstream msg;
    msg << "stationary: " << classes.size() << " ergodic classes;";
    for (const auto& c : classes)
      msg << " {size " << c.size() << ", contains "
          << state_to_string(lattice->states[c.front()]) << "}";
    throw NumericError(msg.str());
  }

  if (method == StationaryMethod::Auto)
    method = S <= 20000 ? StationaryMethod::SparseLu : StationaryMethod::PowerIteration;
  const double tol = 1e-10 * gen.max_abs_entry;
  std::vector<double> p = method == StationaryMethod::SparseLu
                              ? stationary_sparse_lu(gen)
                              : stationary_power(gen, tol);

  DiagonalDistribution dist;
  dist.lattice = std::move(lattice);
  dist.p.assign(S, 0.0);
  double sum = 0.0;
  for (int i = 0; i < S; ++i) {
    double v = p[i];
    if (v < 0.0) {
      if (v < -1e-12)
        throw NumericError("stationary: negative probability " + std::to_string(v));
      v = 0.0;
    }
    dist.p[i] = v;
    sum += v;
  }
  if (!(sum > 0.0)) throw NumericError("stationary: zero-mass solution");
  for (double& v : dist.p) v /= sum;

  std::vector<double> res(S);
  spmv_serial(gen, dist.p, res);
  double rmax = 0.0;
  for (double v : res) rmax = std::max(rmax, std::abs(v));
  if (rmax > 1e-10 * gen.max_abs_entry)
    throw NumericError("stationary: residual " + std::to_string(rmax) +
                       " exceeds tolerance");
  return dist;
}

namespace {

// Normalized Poisson(lam) weights over k in [k_lo, k_hi], anchored at the
// mode so that arbitrarily large lam stays in range. Both discarded tails
// carry relative mass below 1e-15.
struct PoissonWindow {
  long long k_lo = 0, k_hi = 0;
  std::vector<double> w;  // w[k - k_lo]
};

PoissonWindow poisson_window(double lam) {
  PoissonWindow win;
  if (lam <= 0.0) {
    win.w = {1.0};
    return win;
  }
  const long long mode = static_cast<long long>(lam);
  const double cut = 1e-18;
  std::vector<double> down{1.0};  // mode, mode-1, ...
  for (long long k = mode; k > 0; --k) {
    const double next = down.back() * static_cast<double>(k) / lam;
    if (next < cut) break;
    down.push_back(next);
  }
  std::vector<double> up;  // mode+1, mode+2, ...
  double v = 1.0;
  for (long long k = mode + 1;; ++k) {
    v *= lam / static_cast<double>(k);
    if (v < cut) break;
    up.push_back(v);
  }
  win.k_lo = mode - static_cast<long long>(down.size()) + 1;
  win.k_hi = mode + static_cast<long long>(up.size());
  win.w.assign(down.rbegin(), down.rend());
  win.w.insert(win.w.end(), up.begin(), up.end());
  double total = 0.0;
  for (double x : win.w) total += x;
  for (double& x : win.w) x /= total;
  return win;
}

}  // namespace

DiagonalDistribution evolve(const SparseGenerator& gen, const DiagonalDistribution& p0,
                            double t, int n_threads) {
  if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("evolve: t must be >= 0");
  if (static_cast<int>(p0.p.size()) != gen.dim)
    throw std::invalid_argument("evolve: distribution/generator size mismatch");
  DiagonalDistribution out = p0;
  if (t == 0.0) return out;
  const double lambda = gen.max_diag_magnitude();
  if (lambda == 0.0) return out;

  // P = I + Q/Lambda is column-stochastic with the same sparsity pattern.
  SparseGenerator P = gen;
  for (int r = 0; r < P.dim; ++r)
    for (std::int64_t k = P.row_ptr[r]; k < P.row_ptr[r + 1]; ++k) {
      P.val[k] /= lambda;
      if (P.col[k] == r) P.val[k] += 1.0;
    }

  const PoissonWindow win = poisson_window(lambda * t);
  std::vector<double> x = p0.p, y(x.size());
  std::vector<double> acc(x.size(), 0.0);
  auto weight = [&](long long k) -> double {
    return (k < win.k_lo || k > win.k_hi) ? 0.0 : win.w[k - win.k_lo];
  };
  if (win.k_lo == 0)
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] = weight(0) * x[i];
  for (long long k = 1; k <= win.k_hi; ++k) {
    spmv(P, x, y, n_threads);
    x.swap(y);
    const double wk = weight(k);
    if (wk != 0.0)
      for (std::size_t i = 0; i < x.size(); ++i) acc[i] += wk * x[i];
  }
  out.p = std::move(acc);
  return out;
}

MomentSet moments(const DiagonalDistribution& dist) {
  const int m = dist.lattice->mode_count();
  MomentSet mom;
  mom.mean.assign(m, 0.0);
  mom.second.assign(m, std::vector<double>(m, 0.0));
  mom.variance.assign(m, 0.0);
  mom.rel_fluct.assign(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t s = 0; s < dist.p.size(); ++s) {
    const double p = dist.p[s];
    if (p == 0.0) continue;
    const OccState& n = dist.lattice->states[s];
    for (int i = 0; i < m; ++i) {
      mom.mean[i] += p * n[i];
      for (int j = 0; j < m; ++j) mom.second[i][j] += p * n[i] * n[j];
    }
  }
  for (int i = 0; i < m; ++i) {
    mom.variance[i] = std::max(0.0, mom.second[i][i] - mom.mean[i] * mom.mean[i]);
    if (mom.mean[i] > 0.0) mom.rel_fluct[i] = std::sqrt(mom.variance[i]) / mom.mean[i];
  }
  return mom;
}

namespace {

double ipow(double base, int exp) {
  double r = 1.0;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

}  // namespace

double gf_eval(const DiagonalDistribution& dist, std::span<const double> u) {
  double g = 0.0;
  for (std::size_t s = 0; s < dist.p.size(); ++s) {
    if (dist.p[s] == 0.0) continue;
    double term = dist.p[s];
    const OccState& n = dist.lattice->states[s];
    for (std::size_t i = 0; i < u.size(); ++i) term *= ipow(u[i], n[i]);
    g += term;
  }
  return g;
}

double gf_ode_residual(const DiagonalDistribution& dist, double mu,
                       std::span<const double> u_points) {
  if (dist.lattice->mode_count() != 1)
    throw std::invalid_argument("gf_ode_residual: single-mode distribution required");
  double worst = 0.0;
  for (double u : u_points) {
    double g = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t s = 0; s < dist.p.size(); ++s) {
      const double p = dist.p[s];
      const int n = dist.lattice->states[s][0];
      g += p * ipow(u, n);
      if (n >= 1) g1 += p * n * ipow(u, n - 1);
      if (n >= 2) g2 += p * n * (n - 1) * ipow(u, n - 2);
    }
    worst = std::max(worst, std::abs((1.0 + u) * g2 - mu * u * g1 - mu * g));
  }
  return worst;
}

MomentIdentityResiduals moment_identity_residuals(const DiagonalDistribution& dist,
                                                  double l1, double l2) {
  if (dist.lattice->mode_count() != 2)
    throw std::invalid_argument("moment_identity_residuals: two-mode distribution required");
  const MomentSet mom = moments(dist);
  const double n1 = mom.mean[0], n2 = mom.mean[1], n12 = mom.second[0][1];
  MomentIdentityResiduals res;
  res.r_a = l1 * l1 * (1.0 + n1) - n1 - n12;
  res.r_b = -l2 * l2 * n2 + n1 + n12;
  res.ratio_lhs = n2 / (1.0 + n1);
  res.ratio_rhs = (l1 * l1) / (l2 * l2);
  return res;
}

double boundary_tail_mass(const ModelSpec& spec, const DiagonalDistribution& dist) {
  const auto& lat = *dist.lattice;
  const int m = lat.mode_count();
  std::vector<std::vector<int>> disp;
  for (const auto& op : spec.jumps) disp.push_back(op.displacement());
  double mass = 0.0;
  std::vector<int> buf(m);
  for (std::size_t s = 0; s < dist.p.size(); ++s) {
    if (dist.p[s] == 0.0) continue;
    const OccState& n = lat.states[s];
    for (std::size_t a = 0; a < spec.jumps.size(); ++a) {
      if (jump_rate(spec.jumps[a], n) <= 0.0) continue;
      for (int i = 0; i < m; ++i) buf[i] = n[i] + disp[a][i];
      if (lat.index_of(buf) < 0) {
        mass += dist.p[s];
        break;
      }
    }
  }
  return mass;
}

double detailed_balance_residual(const SparseGenerator& gen,
                                 const DiagonalDistribution& dist) {
  double worst = 0.0;
  for (int n = 0; n < gen.dim; ++n)
    for (std::int64_t k = gen.row_ptr[n]; k < gen.row_ptr[n + 1]; ++k) {
      const int m = gen.col[k];
      if (m == n || gen.val[k] <= 0.0) continue;
      const double fwd = dist.p[m] * gen.val[k];           // m -> n
      const double bwd = dist.p[n] * gen.entry(m, n);      // n -> m
      const double scale = std::max({fwd, bwd, 1e-300});
      worst = std::max(worst, std::abs(fwd - bwd) / scale);
    }
  return worst;
}

double tv_exact(const DiagonalDistribution& a, const DiagonalDistribution& b) {
  if (a.p.size() != b.p.size())
    throw std::invalid_argument("tv_exact: distribution size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.p.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
  return 0.5 * s;
}

}  // namespace occnum
