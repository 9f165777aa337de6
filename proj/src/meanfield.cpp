#include "occnum/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "occnum/errors.hpp"

namespace occnum {

double DriftPolynomial::eval(std::span<const double> n) const {
  double s = 0.0;
  for (const auto& term : terms) {
    double v = term.coeff;
    for (std::size_t j = 0; j < term.exps.size(); ++j)
      for (int k = 0; k < term.exps[j]; ++k) v *= n[j];
    s += v;
  }
  return s;
}

std::vector<DriftPolynomial> meanfield_rhs(const ModelSpec& spec) {
  const int m = spec.mode_count();
  std::vector<DriftPolynomial> rhs(m);
  for (const auto& op : spec.jumps) {
    const auto d = op.displacement();
    std::vector<int> exps(m, 0);
    for (int j = 0; j < m; ++j) exps[j] = op.actions[j].destroy + op.actions[j].create;
    const double rate = 2.0 * op.coefficient * op.coefficient;
    for (int i = 0; i < m; ++i)
      if (d[i] != 0) rhs[i].terms.push_back({d[i] * rate, exps});
  }
  return rhs;
}

namespace {

// Dormand-Prince 5(4) tableau (autonomous field, no time column needed).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

using Vec = std::vector<double>;

void combine(Vec& out, const Vec& y, double h,
             std::initializer_list<std::pair<double, const Vec*>> parts) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    double acc = 0.0;
    for (const auto& [w, k] : parts) acc += w * (*k)[i];
    out[i] = y[i] + h * acc;
  }
}

}  // namespace

std::vector<TrajectoryPoint> integrate_meanfield(const ModelSpec& spec,
                                                 std::span<const double> n0,
                                                 double t_final, int samples) {
  if (static_cast<int>(n0.size()) != spec.mode_count())
    throw std::invalid_argument("integrate_meanfield: state length mismatch");
  for (double v : n0)
    if (v < 0.0) throw std::invalid_argument("integrate_meanfield: negative occupancy");
  if (t_final < 0.0) throw std::invalid_argument("integrate_meanfield: t must be >= 0");
  if (samples < 2) samples = 2;

  const auto rhs = meanfield_rhs(spec);
  const int m = spec.mode_count();
  auto field = [&](const Vec& y, Vec& dy) {
    for (int i = 0; i < m; ++i) dy[i] = rhs[i].eval(y);
  };
  auto check_finite = [&](const Vec& y) {
    for (double v : y)
      if (!std::isfinite(v) || std::abs(v) > 1e12)
        throw NumericError("integrate_meanfield: blow-up");
  };

  const double rtol = 1e-9, atol = 1e-12;
  Vec y(n0.begin(), n0.end());
  Vec k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), ytmp(m), ynew(m);
  double t = 0.0;
  double h = t_final > 0.0 ? t_final / 100.0 : 0.0;

  std::vector<TrajectoryPoint> out;
  out.reserve(samples);
  out.push_back({0.0, y});

  for (int s = 1; s < samples; ++s) {
    const double t_target = t_final * s / (samples - 1);
    while (t < t_target) {
      h = std::min(h, t_target - t);
      field(y, k1);
      combine(ytmp, y, h, {{a21, &k1}});
      field(ytmp, k2);
      combine(ytmp, y, h, {{a31, &k1}, {a32, &k2}});
      field(ytmp, k3);
      combine(ytmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
      field(ytmp, k4);
      combine(ytmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      field(ytmp, k5);
      combine(ytmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      field(ytmp, k6);
      combine(ynew, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      field(ynew, k7);

      double err = 0.0;
      for (int i = 0; i < m; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
        const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err = std::max(err, std::abs(ei) / scale);
      }
      if (err <= 1.0) {
        t += h;
        y = ynew;
        check_finite(y);
      }
      const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::clamp(factor, 0.2, 5.0);
      if (h < 1e-14 * std::max(1.0, t_final))
        throw NumericError("integrate_meanfield: step size underflow");
    }
    out.push_back({t_target, y});
  }
  return out;
}

std::complex<double> ComplexPolynomial::eval(const ComplexState& z) const {
  std::complex<double> s = 0.0;
  for (const auto& term : terms) {
    std::complex<double> v = term.coeff;
    for (std::size_t j = 0; j < term.z_pow.size(); ++j) {
      for (int k = 0; k < term.z_pow[j]; ++k) v *= z[j];
      for (int k = 0; k < term.zbar_pow[j]; ++k) v *= std::conj(z[j]);
    }
    s += v;
  }
  return s;
}

ComplexPolynomial ComplexPolynomial::conjugate() const {
  ComplexPolynomial out = *this;
  for (auto& term : out.terms) std::swap(term.z_pow, term.zbar_pow);
  return out;
}

ComplexPolynomial ComplexPolynomial::d_dzbar(int mode) const {
  ComplexPolynomial out;
  for (const auto& term : terms) {
    if (term.zbar_pow[mode] == 0) continue;
    ComplexMonomial d = term;
    d.coeff *= term.zbar_pow[mode];
    d.zbar_pow[mode] -= 1;
    out.terms.push_back(std::move(d));
  }
  return out;
}

ComplexPolynomial jump_function(const ModelSpec& spec, std::size_t jump) {
  const auto& op = spec.jumps.at(jump);
  ComplexMonomial mono;
  mono.coeff = op.coefficient;
  mono.z_pow.resize(spec.mode_count());
  mono.zbar_pow.resize(spec.mode_count());
  // Destroy powers become z factors, create powers conj(z) factors; the
  // operator substitution z -> a, conj(z) -> a+ then recovers the jumps.
  for (int i = 0; i < spec.mode_count(); ++i) {
    mono.z_pow[i] = op.actions[i].destroy;
    mono.zbar_pow[i] = op.actions[i].create;
  }
  return ComplexPolynomial{{mono}};
}

ComplexPolynomial hamiltonian_function(const ModelSpec& spec) {
  ComplexPolynomial h;
  for (int i = 0; i < spec.mode_count(); ++i) {
    const double w = i < static_cast<int>(spec.frequencies.size())
                         ? spec.frequencies[i] : 0.0;
    if (w == 0.0) continue;
    ComplexMonomial mono;
    mono.coeff = w;
    mono.z_pow.assign(spec.mode_count(), 0);
    mono.zbar_pow.assign(spec.mode_count(), 0);
    mono.z_pow[i] = 1;
    mono.zbar_pow[i] = 1;
    h.terms.push_back(std::move(mono));
  }
  return h;
}

ComplexState decomposition_rhs(const ModelSpec& spec, const ComplexState& z) {
  const int m = spec.mode_count();
  const ComplexPolynomial h = hamiltonian_function(spec);
  ComplexState out(m, 0.0);
  const std::complex<double> minus_i(0.0, -1.0);
  for (int i = 0; i < m; ++i) out[i] = minus_i * h.d_dzbar(i).eval(z);
  for (std::size_t a = 0; a < spec.jumps.size(); ++a) {
    const ComplexPolynomial r = jump_function(spec, a);
    const ComplexPolynomial rbar = r.conjugate();
    const std::complex<double> r_val = r.eval(z);
    const std::complex<double> rbar_val = rbar.eval(z);
    for (int i = 0; i < m; ++i)
      out[i] += rbar_val * r.d_dzbar(i).eval(z) - r_val * rbar.d_dzbar(i).eval(z);
  }
  return out;
}

ComplexState direct_rhs(BuiltinModel model, const std::vector<double>& params,
                        const ComplexState& z) {
  const std::complex<double> minus_i(0.0, -1.0);
  switch (model) {
    case BuiltinModel::Oscillator: {
      const double mu = params.at(0);
      const double omega = params.size() > 1 ? params[1] : 0.0;
      const double n = std::norm(z.at(0));
      return {minus_i * omega * z[0] + mu * z[0] - 2.0 * z[0] * n};
    }
    case BuiltinModel::LotkaVolterra: {
      const double l1 = params.at(0), l2 = params.at(1);
      const double n1 = std::norm(z.at(0)), n2 = std::norm(z.at(1));
      return {l1 * l1 * z[0] - z[0] * n2, -l2 * l2 * z[1] + z[1] * n1};
    }
    case BuiltinModel::Cannibal: {
      const double l1 = params.at(0), l2 = params.at(1);
      const double n1 = std::norm(z.at(0)), n2 = std::norm(z.at(1));
      return {(l2 * l2 - l1 * l1) * z[0] * n2, (l1 * l1 - l2 * l2) * z[1] * n1};
    }
    default:
      throw std::invalid_argument("direct_rhs: no closed form for this model");
  }
}

double faq_residual_for(const ModelSpec& spec, BuiltinModel model,
                        const std::vector<double>& params,
                        std::span<const ComplexState> points) {
  if (points.empty()) throw std::invalid_argument("faq_residual: no points");
  double worst = 0.0;
  for (const auto& z : points) {
    const ComplexState lhs = decomposition_rhs(spec, z);
    const ComplexState rhs = direct_rhs(model, params, z);
    for (std::size_t i = 0; i < lhs.size(); ++i)
      worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  }
  return worst;
}

double faq_residual(BuiltinModel model, const std::vector<double>& params,
                    std::span<const ComplexState> points) {
  return faq_residual_for(builtin_model(model, params), model, params, points);
}

std::vector<ComplexState> random_complex_points(int modes, int count, double max_abs,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> part(-max_abs / std::sqrt(2.0),
                                              max_abs / std::sqrt(2.0));
  std::vector<ComplexState> points(count);
  for (auto& z : points) {
    z.resize(modes);
    for (auto& zi : z) zi = {part(rng), part(rng)};
  }
  return points;
}

}  // namespace occnum
