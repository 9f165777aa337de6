#include "occnum/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace occnum {

bool TruncatedLattice::inside_box(std::span<const int> n) const {
  for (std::size_t i = 0; i < caps.size(); ++i)
    if (n[i] < 0 || n[i] > caps[i]) return false;
  return true;
}

long long TruncatedLattice::index_of(std::span<const int> n) const {
  if (!inside_box(n)) return -1;
  if (!manifold) {
    long long idx = 0;
    for (std::size_t i = 0; i < caps.size(); ++i) idx += strides_[i] * n[i];
    return idx;
  }
  long long dot = 0;
  for (std::size_t i = 0; i < caps.size(); ++i)
    dot += static_cast<long long>(manifold->c[i]) * n[i];
  if (dot != manifold->total) return -1;
  const auto it = std::lower_bound(states.begin(), states.end(), n,
                                   [](const OccState& a, std::span<const int> b) {
                                     return std::lexicographical_compare(
                                         a.begin(), a.end(), b.begin(), b.end());
                                   });
  if (it == states.end() || !std::equal(it->begin(), it->end(), n.begin())) return -1;
  return it - states.begin();
}

TruncatedLattice enumerate_states(const ModelSpec& spec, std::vector<int> caps,
                                  std::optional<ManifoldConstraint> manifold) {
  const int m = spec.mode_count();
  if (static_cast<int>(caps.size()) != m)
    throw std::invalid_argument("caps length does not match mode count");
  for (int c : caps)
    if (c < 0) throw std::invalid_argument("negative cap");
  if (manifold && static_cast<int>(manifold->c.size()) != m)
    throw std::invalid_argument("manifold vector length does not match mode count");

  TruncatedLattice lat;
  lat.caps = caps;
  lat.manifold = manifold;
  if (!manifold) {
    lat.strides_.assign(m, 1);
    for (int i = m - 2; i >= 0; --i)
      lat.strides_[i] = lat.strides_[i + 1] * (caps[i + 1] + 1);
    long long total = lat.strides_[0] * (caps[0] + 1);
    lat.states.reserve(static_cast<std::size_t>(total));
  }

  OccState n(m, 0);
  while (true) {
    bool keep = true;
    if (manifold) {
      long long dot = 0;
      for (int i = 0; i < m; ++i)
        dot += static_cast<long long>(manifold->c[i]) * n[i];
      keep = dot == manifold->total;
    }
    if (keep) lat.states.push_back(n);
    int i = m - 1;
    while (i >= 0 && n[i] == caps[i]) n[i--] = 0;
    if (i < 0) break;
    ++n[i];
  }
  if (lat.states.empty()) throw std::invalid_argument("empty lattice");
  return lat;
}

std::vector<int> default_caps(BuiltinModel model, const std::vector<double>& params,
                              long long manifold_total) {
  switch (model) {
    case BuiltinModel::Oscillator: {
      const double mu = params.at(0);
      return {static_cast<int>(std::ceil(2.0 * mu)) + 30};
    }
    case BuiltinModel::LotkaVolterra: {
      const double l1 = params.at(0), l2 = params.at(1);
      const int cap = static_cast<int>(std::ceil(4.0 * std::max(l1 * l1, l2 * l2))) + 30;
      return {cap, cap};
    }
    case BuiltinModel::LotkaVolterraTruncated:
    case BuiltinModel::Cannibal: {
      if (manifold_total < 0)
        throw std::invalid_argument("conserved model needs a manifold total");
      const int cap = static_cast<int>(manifold_total);
      return {cap, cap};
    }
  }
  throw std::invalid_argument("unknown model");
}

}  // namespace occnum
