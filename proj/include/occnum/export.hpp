#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "occnum/meanfield.hpp"
#include "occnum/solver.hpp"
#include "occnum/ssa.hpp"

namespace occnum {

// 17-significant-digit float formatting shared by every emitter so that
// identical runs produce byte-identical files.
std::string format_g17(double v);

// CSV files start with "# schema: <name>/1"; JSON carries "schema_version".
void write_distribution_csv(std::ostream& out, const DiagonalDistribution& dist);
void write_histogram_csv(std::ostream& out, const EmpiricalDistribution& emp);
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& traj);
void write_moments_json(std::ostream& out, const MomentSet& moments);

}  // namespace occnum
