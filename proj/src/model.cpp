#include "occnum/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace occnum {

std::vector<int> JumpOperator::displacement() const {
  std::vector<int> d(actions.size(), 0);
  for (std::size_t i = 0; i < actions.size(); ++i)
    d[i] = actions[i].create - actions[i].destroy;
  return d;
}

int ModelSpec::mode_index(const std::string& mode_name) const {
  for (std::size_t i = 0; i < mode_names.size(); ++i)
    if (mode_names[i] == mode_name) return static_cast<int>(i);
  return -1;
}

const char* builtin_name(BuiltinModel model) {
  switch (model) {
    case BuiltinModel::Oscillator: return "oscillator";
    case BuiltinModel::LotkaVolterra: return "lvm";
    case BuiltinModel::LotkaVolterraTruncated: return "lvm_truncated";
    case BuiltinModel::Cannibal: return "cannibal";
  }
  return "?";
}

namespace {

JumpOperator make_jump(double coeff, int modes,
                       std::initializer_list<std::pair<int, ModeAction>> factors) {
  JumpOperator op;
  op.coefficient = coeff;
  op.actions.assign(modes, ModeAction{});
  for (const auto& [mode, act] : factors) op.actions[mode] = act;
  return op;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument(std::string("non-positive parameter: ") + what);
}

}  // namespace

ModelSpec builtin_model(BuiltinModel model, const std::vector<double>& params) {
  ModelSpec spec;
  spec.name = builtin_name(model);
  switch (model) {
    case BuiltinModel::Oscillator: {
      if (params.empty() || params.size() > 2)
        throw std::invalid_argument("oscillator expects params {mu[, omega]}");
      const double mu = params[0];
      const double omega = params.size() > 1 ? params[1] : 0.0;
      require_positive(mu, "mu");
      if (omega < 0.0 || !std::isfinite(omega))
        throw std::invalid_argument("oscillator omega must be >= 0");
      spec.mode_names = {"a"};
      spec.frequencies = {omega};
      spec.jumps = {make_jump(std::sqrt(mu), 1, {{0, {.destroy = 0, .create = 1}}}),
                    make_jump(1.0, 1, {{0, {.destroy = 2, .create = 0}}})};
      break;
    }
    case BuiltinModel::LotkaVolterra: {
      if (params.size() != 2) throw std::invalid_argument("lvm expects params {l1, l2}");
      require_positive(params[0], "l1");
      require_positive(params[1], "l2");
      spec.mode_names = {"n1", "n2"};
      spec.frequencies = {0.0, 0.0};
      spec.jumps = {make_jump(params[0], 2, {{0, {.destroy = 0, .create = 1}}}),
                    make_jump(params[1], 2, {{1, {.destroy = 1, .create = 0}}}),
                    make_jump(1.0, 2,
                              {{0, {.destroy = 1, .create = 0}},
                               {1, {.destroy = 0, .create = 1}}})};
      break;
    }
    case BuiltinModel::LotkaVolterraTruncated: {
      if (!params.empty())
        throw std::invalid_argument("lvm_truncated expects no params");
      spec.mode_names = {"n1", "n2"};
      spec.frequencies = {0.0, 0.0};
      spec.jumps = {make_jump(1.0, 2,
                              {{0, {.destroy = 1, .create = 0}},
                               {1, {.destroy = 0, .create = 1}}})};
      break;
    }
    case BuiltinModel::Cannibal: {
      if (params.size() != 2) throw std::invalid_argument("cannibal expects params {l1, l2}");
      require_positive(params[0], "l1");
      require_positive(params[1], "l2");
      spec.mode_names = {"n1", "n2"};
      spec.frequencies = {0.0, 0.0};
      spec.jumps = {make_jump(params[0], 2,
                              {{0, {.destroy = 1, .create = 0}},
                               {1, {.destroy = 0, .create = 1}}}),
                    make_jump(params[1], 2,
                              {{0, {.destroy = 0, .create = 1}},
                               {1, {.destroy = 1, .create = 0}}})};
      break;
    }
  }
  return spec;
}

ModelSpec builtin_model(const std::string& name, const std::vector<double>& params) {
  for (BuiltinModel m : {BuiltinModel::Oscillator, BuiltinModel::LotkaVolterra,
                         BuiltinModel::LotkaVolterraTruncated, BuiltinModel::Cannibal})
    if (name == builtin_name(m)) return builtin_model(m, params);
  throw std::invalid_argument("unknown built-in model: " + name);
}

namespace {

long long igcd(long long a, long long b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

// Small exact rational used only during back-substitution.
struct Rat {
  long long num = 0, den = 1;
  void reduce() {
    if (den < 0) { num = -num; den = -den; }
    long long g = igcd(num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
  }
};

}  // namespace

std::vector<ConservationVector> conserved_totals(const ModelSpec& spec) {
  const int m = spec.mode_count();
  std::vector<std::vector<long long>> rows;
  rows.reserve(spec.jumps.size());
  for (const auto& op : spec.jumps) {
    std::vector<long long> row(m, 0);
    const auto d = op.displacement();
    for (int i = 0; i < m; ++i) row[i] = d[i];
    rows.push_back(std::move(row));
  }

  // Fraction-free Gauss-Jordan elimination of the displacement matrix.
  std::vector<int> pivot_cols;
  std::size_t rank = 0;
  for (int c = 0; c < m && rank < rows.size(); ++c) {
    std::size_t sel = rank;
    while (sel < rows.size() && rows[sel][c] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[sel], rows[rank]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == rank || rows[i][c] == 0) continue;
      const long long a = rows[rank][c], b = rows[i][c];
      const long long g = igcd(a, b);
      for (int j = 0; j < m; ++j)
        rows[i][j] = rows[i][j] * (a / g) - rows[rank][j] * (b / g);
      long long rg = 0;
      for (int j = 0; j < m; ++j) rg = igcd(rg, rows[i][j]);
      if (rg > 1)
        for (int j = 0; j < m; ++j) rows[i][j] /= rg;
    }
    pivot_cols.push_back(c);
    ++rank;
  }

  std::vector<bool> is_pivot(m, false);
  for (int c : pivot_cols) is_pivot[c] = true;

  std::vector<ConservationVector> basis;
  for (int f = 0; f < m; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rat> x(m);
    x[f] = Rat{1, 1};
    for (std::size_t i = 0; i < rank; ++i) {
      const int p = pivot_cols[i];
      // Pivot rows are zero at all other pivot columns, so only the free
      // column contributes: x[p] = -row[f] / row[p].
      Rat v{-rows[i][f], rows[i][p]};
      v.reduce();
      x[p] = v;
    }
    long long lcm = 1;
    for (const auto& r : x) lcm = lcm / igcd(lcm, r.den) * r.den;
    ConservationVector vec(m, 0);
    for (int j = 0; j < m; ++j) vec[j] = static_cast<int>(x[j].num * (lcm / x[j].den));
    long long g = 0;
    for (int v : vec) g = igcd(g, v);
    if (g > 1)
      for (int& v : vec) v = static_cast<int>(v / g);
    for (int v : vec) {
      if (v == 0) continue;
      if (v < 0)
        for (int& w : vec) w = -w;
      break;
    }
    basis.push_back(std::move(vec));
  }
  return basis;
}

std::vector<std::string> validate(const ModelSpec& spec) {
  std::vector<std::string> errors;
  const int m = spec.mode_count();
  if (m == 0) errors.push_back("model has no modes");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (spec.mode_names[i] == spec.mode_names[j])
        errors.push_back("duplicate mode name: " + spec.mode_names[i]);
  if (!spec.frequencies.empty() && static_cast<int>(spec.frequencies.size()) != m)
    errors.push_back("frequency list length does not match mode count");
  for (std::size_t k = 0; k < spec.jumps.size(); ++k) {
    const auto& op = spec.jumps[k];
    const std::string tag = "jump " + std::to_string(k) + ": ";
    if (!(op.coefficient > 0.0) || !std::isfinite(op.coefficient))
      errors.push_back(tag + "non-positive coefficient");
    if (static_cast<int>(op.actions.size()) != m) {
      errors.push_back(tag + "action list length does not match mode count");
      continue;
    }
    bool touched = false;
    for (int i = 0; i < m; ++i) {
      const auto& act = op.actions[i];
      if (act.destroy < 0 || act.create < 0)
        errors.push_back(tag + "negative exponent on mode " + spec.mode_names[i]);
      if (act.destroy > 0 && act.create > 0)
        errors.push_back(tag + "mixed action on mode " + spec.mode_names[i]);
      touched = touched || act.touched();
    }
    if (!touched) errors.push_back(tag + "no factors");
  }
  return errors;
}

}  // namespace occnum
