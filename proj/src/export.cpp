#include "occnum/export.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>

namespace occnum {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_distribution_csv(std::ostream& out, const DiagonalDistribution& dist) {
  const int m = dist.lattice->mode_count();
  out << "# schema: occnum.distribution/1\n";
  for (int i = 0; i < m; ++i) out << "n" << i + 1 << ",";
  out << "probability\n";
  for (std::size_t s = 0; s < dist.p.size(); ++s) {
    for (int v : dist.lattice->states[s]) out << v << ",";
    out << format_g17(dist.p[s]) << "\n";
  }
}

void write_histogram_csv(std::ostream& out, const EmpiricalDistribution& emp) {
  out << "# schema: occnum.histogram/1\n";
  for (int i = 0; i < emp.modes; ++i) out << "n" << i + 1 << ",";
  out << "count\n";
  for (const auto& [state, count] : emp.counts) {
    for (int v : state) out << v << ",";
    out << count << "\n";
  }
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& traj) {
  out << "# schema: occnum.trajectory/1\n";
  out << "t";
  if (!traj.empty())
    for (std::size_t i = 0; i < traj.front().n.size(); ++i) out << ",n" << i + 1;
  out << "\n";
  for (const auto& point : traj) {
    out << format_g17(point.t);
    for (double v : point.n) out << "," << format_g17(v);
    out << "\n";
  }
}

void write_moments_json(std::ostream& out, const MomentSet& moments) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["mean"] = moments.mean;
  j["second"] = moments.second;
  j["variance"] = moments.variance;
  auto& rel = j["rel_fluct"] = nlohmann::ordered_json::array();
  for (double v : moments.rel_fluct) {
    if (std::isnan(v))
      rel.push_back(nullptr);
    else
      rel.push_back(v);
  }
  out << j.dump(2) << "\n";
}

}  // namespace occnum
