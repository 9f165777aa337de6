#pragma once

#include <string>
#include <vector>

namespace occnum {

// One factor of a jump monomial on a single mode: a destroy power, a create
// power, or neither. A mode never carries both within one operator.
struct ModeAction {
  int destroy = 0;
  int create = 0;
  bool touched() const { return destroy > 0 || create > 0; }
  bool operator==(const ModeAction&) const = default;
};

// Monomial jump operator: coefficient times a product of per-mode
// create/destroy factors. The coefficient is the monomial coefficient
// (lambda), not a rate; the transition rate is 2*lambda^2 times the
// occupation-dependent factors.
struct JumpOperator {
  double coefficient = 0.0;
  std::vector<ModeAction> actions;  // one entry per mode

  // Net occupation change when the jump fires (create - destroy per mode).
  std::vector<int> displacement() const;
  bool operator==(const JumpOperator&) const = default;
};

struct ModelSpec {
  std::string name;
  std::vector<std::string> mode_names;
  std::vector<JumpOperator> jumps;
  std::vector<double> frequencies;  // per-mode omega; mean-field use only

  int mode_count() const { return static_cast<int>(mode_names.size()); }
  int mode_index(const std::string& mode_name) const;  // -1 if unknown
  bool operator==(const ModelSpec&) const = default;
};

enum class BuiltinModel { Oscillator, LotkaVolterra, LotkaVolterraTruncated, Cannibal };

// Canonical external names: oscillator, lvm, lvm_truncated, cannibal.
const char* builtin_name(BuiltinModel model);

// Built-in operator sets:
//   oscillator(mu, omega=0): sqrt(mu)*create(a), destroy(a,2)
//   lvm(l1, l2):             l1*create(n1), l2*destroy(n2), destroy(n1)create(n2)
//   lvm_truncated():         destroy(n1)create(n2)
//   cannibal(l1, l2):        l1*destroy(n1)create(n2), l2*create(n1)destroy(n2)
// Throws std::invalid_argument on unknown name or invalid parameters.
ModelSpec builtin_model(BuiltinModel model, const std::vector<double>& params);
ModelSpec builtin_model(const std::string& name, const std::vector<double>& params);

using ConservationVector = std::vector<int>;

// Basis of integer vectors c with c . d = 0 for every jump displacement d,
// computed by exact integer elimination. Empty when nothing is conserved.
std::vector<ConservationVector> conserved_totals(const ModelSpec& spec);

// Structural validation. Empty result means the spec is well formed.
std::vector<std::string> validate(const ModelSpec& spec);

}  // namespace occnum
