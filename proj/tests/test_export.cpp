#include <doctest.h>

#include <memory>
#include <sstream>

#include "occnum/export.hpp"

using namespace occnum;

namespace {

std::shared_ptr<const TruncatedLattice> tiny_manifold() {
  const auto spec = builtin_model(BuiltinModel::LotkaVolterraTruncated, {});
  return std::make_shared<const TruncatedLattice>(
      enumerate_states(spec, {1, 1}, ManifoldConstraint{{1, 1}, 1}));
}

}  // namespace

TEST_CASE("distribution CSV layout is stable") {
  const auto dist = point_mass(tiny_manifold(), OccState{1, 0});
  std::ostringstream out;
  write_distribution_csv(out, dist);
  CHECK(out.str() ==
        "# schema: occnum.distribution/1\n"
        "n1,n2,probability\n"
        "0,1,0\n"
        "1,0,1\n");
}

TEST_CASE("histogram CSV layout is stable") {
  EmpiricalDistribution emp{2, 3, 7, {{OccState{0, 1}, 2}, {OccState{1, 0}, 1}}};
  std::ostringstream out;
  write_histogram_csv(out, emp);
  CHECK(out.str() ==
        "# schema: occnum.histogram/1\n"
        "n1,n2,count\n"
        "0,1,2\n"
        "1,0,1\n");
}

TEST_CASE("moments JSON carries nulls for undefined relative fluctuations") {
  const auto dist = point_mass(tiny_manifold(), OccState{0, 1});
  std::ostringstream out;
  write_moments_json(out, moments(dist));
  const std::string text = out.str();
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);
  CHECK(text.find("null") != std::string::npos);  // mode 1 has mean 0
  CHECK(text.find("\"variance\"") != std::string::npos);
}

TEST_CASE("trajectory CSV layout is stable") {
  std::vector<TrajectoryPoint> traj{{0.0, {2.0, 0.0}}, {0.5, {1.5, 0.5}}};
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  CHECK(out.str() ==
        "# schema: occnum.trajectory/1\n"
        "t,n1,n2\n"
        "0,2,0\n"
        "0.5,1.5,0.5\n");
}

TEST_CASE("17-significant-digit formatting") {
  CHECK(format_g17(1.0) == "1");
  CHECK(format_g17(0.5) == "0.5");
  CHECK(format_g17(1.0 / 3.0) == "0.33333333333333331");
}
