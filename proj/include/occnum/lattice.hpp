#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "occnum/model.hpp"

namespace occnum {

using OccState = std::vector<int>;

// Restriction of the state space to a fixed linear combination of
// occupations: c . n == total.
struct ManifoldConstraint {
  ConservationVector c;
  long long total = 0;
};

// Finite set of occupation states: a per-mode box, optionally intersected
// with a conserved manifold. States are stored in lexicographic order and
// index_of is a bijection onto 0..size()-1.
struct TruncatedLattice {
  std::vector<int> caps;                       // inclusive per-mode maxima
  std::optional<ManifoldConstraint> manifold;
  std::vector<OccState> states;

  std::size_t size() const { return states.size(); }
  int mode_count() const { return static_cast<int>(caps.size()); }

  // Ordinal of a state, or -1 if it lies outside the lattice.
  long long index_of(std::span<const int> n) const;

  bool inside_box(std::span<const int> n) const;

 private:
  friend TruncatedLattice enumerate_states(const ModelSpec&, std::vector<int>,
                                           std::optional<ManifoldConstraint>);
  std::vector<long long> strides_;  // box fast path; empty when manifold set
};

// Enumerates all states of the box defined by caps (intersected with the
// manifold when given), lexicographically ordered. Throws on an empty
// lattice or invalid caps.
TruncatedLattice enumerate_states(const ModelSpec& spec, std::vector<int> caps,
                                  std::optional<ManifoldConstraint> manifold = {});

// Per-mode caps leaving generous headroom above the stationary bulk:
// oscillator ceil(2*mu)+30; Lotka-Volterra ceil(4*max(l1^2,l2^2))+30 per
// mode. Conserved models take their manifold total as the cap.
std::vector<int> default_caps(BuiltinModel model, const std::vector<double>& params,
                              long long manifold_total = -1);

}  // namespace occnum
