#include "occnum/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace occnum {

namespace {

struct LineScanner {
  const std::string& s;
  int line;
  std::size_t pos = 0;

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw ParseError(line, static_cast<int>(at) + 1, msg);
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string ident(const char* what) {
    skip_ws();
    if (pos >= s.size() || !ident_start(s[pos])) fail(pos, std::string("expected ") + what);
    std::size_t start = pos;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  }
  double real(const char* what) {
    skip_ws();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail(pos, std::string("expected ") + what);
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }
  long integer(const char* what) {
    skip_ws();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end == begin) fail(pos, std::string("expected ") + what);
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }
  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      fail(pos, std::string("expected '") + c + "'");
    ++pos;
  }
  void expect_end() {
    skip_ws();
    if (pos < s.size()) fail(pos, "unexpected trailing input");
  }
};

}  // namespace

ModelSpec parse_model(const std::string& text) {
  ModelSpec spec;
  bool have_model_line = false;
  std::vector<bool> omega_set;
  std::vector<int> jump_lines;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    LineScanner sc{raw, line_no};
    if (sc.done()) continue;

    const std::size_t kw_at = sc.pos;
    const std::string kw = sc.ident("directive");
    if (kw == "model") {
      if (have_model_line) sc.fail(kw_at, "duplicate model declaration");
      spec.name = sc.ident("model name");
      sc.expect_end();
      have_model_line = true;
    } else if (kw == "mode") {
      const std::size_t at = sc.pos;
      const std::string name = sc.ident("mode name");
      sc.expect_end();
      if (spec.mode_index(name) >= 0) sc.fail(at, "duplicate mode: " + name);
      spec.mode_names.push_back(name);
      spec.frequencies.push_back(0.0);
      omega_set.push_back(false);
    } else if (kw == "omega") {
      const std::size_t at = sc.pos;
      const std::string name = sc.ident("mode name");
      const int idx = spec.mode_index(name);
      if (idx < 0) sc.fail(at, "unknown mode: " + name);
      const double w = sc.real("frequency");
      sc.expect_end();
      if (omega_set[idx]) sc.fail(at, "duplicate omega for mode: " + name);
      spec.frequencies[idx] = w;
      omega_set[idx] = true;
    } else if (kw == "jump") {
      const std::size_t coeff_at = sc.pos;
      sc.skip_ws();
      const double coeff = sc.real("coefficient");
      if (!(coeff > 0.0) || !std::isfinite(coeff))
        sc.fail(coeff_at, "non-positive coefficient");
      sc.expect('*');
      JumpOperator op;
      op.coefficient = coeff;
      op.actions.assign(spec.mode_names.size(), ModeAction{});
      int factors = 0;
      while (!sc.done()) {
        const std::size_t fac_at = sc.pos;
        const std::string fn = sc.ident("factor (create/destroy)");
        if (fn != "create" && fn != "destroy")
          sc.fail(fac_at, "unknown factor '" + fn + "' (expected create or destroy)");
        sc.expect('(');
        const std::size_t mode_at = sc.pos;
        const std::string mode = sc.ident("mode name");
        const int idx = spec.mode_index(mode);
        if (idx < 0) sc.fail(mode_at, "unknown mode: " + mode);
        long power = 1;
        sc.skip_ws();
        if (sc.pos < raw.size() && raw[sc.pos] == ',') {
          ++sc.pos;
          const std::size_t pow_at = sc.pos;
          power = sc.integer("exponent");
          if (power < 1) sc.fail(pow_at, "exponent must be a positive integer");
        }
        sc.expect(')');
        if (fn == "create")
          op.actions[idx].create += static_cast<int>(power);
        else
          op.actions[idx].destroy += static_cast<int>(power);
        ++factors;
      }
      if (factors == 0) sc.fail(sc.pos, "jump needs at least one factor");
      spec.jumps.push_back(std::move(op));
      jump_lines.push_back(line_no);
    } else {
      sc.fail(kw_at, "unknown directive '" + kw + "'");
    }
  }

  const auto errors = validate(spec);
  if (!errors.empty()) {
    // Locate the first error at its jump's line when possible.
    const std::string& msg = errors.front();
    int at_line = line_no == 0 ? 1 : line_no;
    if (msg.rfind("jump ", 0) == 0) {
      const std::size_t k = std::strtoul(msg.c_str() + 5, nullptr, 10);
      if (k < jump_lines.size()) at_line = jump_lines[k];
    }
    throw ParseError(at_line, 1, msg);
  }
  return spec;
}

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_model(const ModelSpec& spec) {
  std::ostringstream out;
  out << "# occnum model file\n";
  out << "# jump coefficients are monomial coefficients (lambda); the\n";
  out << "# transition rate is 2*lambda^2 times the occupation factors.\n";
  if (!spec.name.empty()) out << "model " << spec.name << "\n";
  for (const auto& name : spec.mode_names) out << "mode " << name << "\n";
  for (std::size_t i = 0; i < spec.frequencies.size(); ++i)
    if (spec.frequencies[i] != 0.0)
      out << "omega " << spec.mode_names[i] << " " << g17(spec.frequencies[i]) << "\n";
  for (const auto& op : spec.jumps) {
    out << "jump " << g17(op.coefficient) << " *";
    for (std::size_t i = 0; i < op.actions.size(); ++i) {
      const auto& act = op.actions[i];
      if (act.destroy > 0) {
        out << " destroy(" << spec.mode_names[i];
        if (act.destroy > 1) out << "," << act.destroy;
        out << ")";
      }
      if (act.create > 0) {
        out << " create(" << spec.mode_names[i];
        if (act.create > 1) out << "," << act.create;
        out << ")";
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace occnum
