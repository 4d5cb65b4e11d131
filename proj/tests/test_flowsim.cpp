#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "aeronet/flowsim.hpp"
#include "testutil.hpp"

using namespace aeronet;
using flow::Vec2;
using flow::VectorField;

namespace {
constexpr double kPi = 3.14159265358979323846;

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
}  // namespace

TEST_CASE("uniform field integrates to a straight translation") {
  const VectorField f = VectorField::uniform(1.0, 0.0);
  const Vec2 y = flow::integrate_flow(f, 0.0, 10.0, Vec2{0.0, 0.0}, 0.1);
  CHECK_EQ(y.x, doctest::Approx(10.0).epsilon(1e-12));
  CHECK_EQ(y.y, 0.0);
}

TEST_CASE("rotation field turns a quarter circle") {
  const VectorField f = VectorField::rotation(kPi / 2.0);
  const Vec2 y = flow::integrate_flow(f, 0.0, 1.0, Vec2{1.0, 0.0}, 1e-3);
  CHECK_LT(dist(y, Vec2{0.0, 1.0}), 1e-8);
}

TEST_CASE("t == s returns x unchanged") {
  const VectorField f = VectorField::double_gyre();
  const Vec2 x{0.3, 0.7};
  const Vec2 y = flow::integrate_flow(f, 5.0, 5.0, x, 0.01);
  CHECK_EQ(y.x, x.x);
  CHECK_EQ(y.y, x.y);
}

TEST_CASE("flow laws hold to 1e-6 at h = 1e-3") {
  const std::vector<VectorField> fields = {
      VectorField::uniform(0.4, -0.2), VectorField::rotation(0.7, Vec2{0.1, -0.2}),
      VectorField::shear(0.5), VectorField::double_gyre()};
  for (const VectorField& f : fields) {
    CAPTURE(f.name());
    const Vec2 x{0.4, 0.3};
    // semigroup law through an interior time
    CHECK_LT(flow_semigroup_residual(f, 0.0, 1.7, 5.0, x, 1e-3), 1e-6);
    // t' == s is an identity
    CHECK_EQ(flow_semigroup_residual(f, 0.0, 0.0, 3.0, x, 1e-3), 0.0);
    // inverse law: integrate forward then backward
    const Vec2 fwd = flow::integrate_flow(f, 0.0, 5.0, x, 1e-3);
    const Vec2 back = flow::integrate_flow(f, 5.0, 0.0, fwd, 1e-3);
    CHECK_LT(dist(back, x), 1e-6);
  }
}

TEST_CASE("integration is fourth-order in the step size") {
  const VectorField f = VectorField::rotation(1.0);
  const Vec2 x{1.0, 0.0};
  const double t = 10.0;
  const Vec2 exact{std::cos(t), std::sin(t)};
  const double e1 = dist(flow::integrate_flow(f, 0.0, t, x, 0.2), exact);
  const double e2 = dist(flow::integrate_flow(f, 0.0, t, x, 0.1), exact);
  const double ratio = e1 / e2;
  CHECK_GT(ratio, 12.8);  // 16 expected for order 4, 20% slack
  CHECK_LT(ratio, 19.2);
}

TEST_CASE("jacobian determinants") {
  SUBCASE("volume preserved by uniform and rotation fields") {
    CHECK_EQ(flow::jacobian_det(VectorField::uniform(1.0, 2.0), 0.0, 3.0,
                                Vec2{0.0, 0.0}, 1e-3, 1e-5),
             doctest::Approx(1.0).epsilon(1e-6));
    CHECK_EQ(flow::jacobian_det(VectorField::rotation(0.9), 0.0, 3.0, Vec2{0.5, 0.2},
                                1e-3, 1e-5),
             doctest::Approx(1.0).epsilon(1e-4));
    CHECK_EQ(flow::jacobian_det(VectorField::double_gyre(), 0.0, 3.0, Vec2{0.7, 0.4},
                                1e-3, 1e-5),
             doctest::Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("linear field with trace 0.5 follows the Liouville growth") {
    // F(x, y) = (x, -0.5 y): div F = 0.5, so det J = exp(0.5 (t - s))
    const VectorField f = VectorField::custom(
        "linear_tr05", [](double, const Vec2& p) { return Vec2{p.x, -0.5 * p.y}; });
    const double det = flow::jacobian_det(f, 0.0, 1.0, Vec2{0.2, 0.4}, 1e-3, 1e-6);
    CHECK_EQ(det, doctest::Approx(std::exp(0.5)).epsilon(1e-3));
  }
}

TEST_CASE("diverging integration reports BlowUp") {
  const VectorField f = VectorField::custom(
      "quadratic", [](double, const Vec2& p) { return Vec2{p.x * p.x, 0.0}; });
  CHECK_THROWS_AS(flow::integrate_flow(f, 0.0, 2.0, Vec2{2.0, 0.0}, 1e-3), BlowUp);
}

TEST_CASE("backward corpus from a westward wind points east") {
  flow::CorpusSpec spec;
  spec.arrival_points = {{Vec2{0.0, 0.0}, std::nullopt},
                         {Vec2{0.0, 0.5}, std::nullopt}};
  spec.arrival_times = {1293883200, 1293969600};
  spec.delta_seconds = -7200;
  spec.fix_interval_seconds = 3600;
  spec.step_seconds = 60.0;
  // wind blowing towards -x: back-trajectories extend towards +x (east)
  const traj::TrajectoryCorpus corpus =
      flow::generate_corpus(VectorField::uniform(-1e-4, 0.0), spec);
  REQUIRE_EQ(corpus.segments.size(), 4);
  CHECK_EQ(corpus.delta_seconds, -7200);
  // ordering is arrival-point major
  CHECK_EQ(corpus.segments[0].traj_id, "b000_s000");
  CHECK_EQ(corpus.segments[1].traj_id, "b000_s001");
  CHECK_EQ(corpus.segments[2].traj_id, "b001_s000");
  for (const auto& seg : corpus.segments) {
    REQUIRE_EQ(seg.fixes.size(), 3);
    CHECK(seg.backward());
    for (std::size_t i = 0; i + 1 < seg.fixes.size(); ++i) {
      CHECK_GT(seg.fixes[i].p.lon, seg.fixes[i + 1].p.lon);  // east of the arrival
      CHECK_EQ(seg.fixes[i].p.lat, doctest::Approx(seg.origin.lat).epsilon(1e-12));
    }
    CHECK_EQ(seg.fixes.front().p.lon,
             doctest::Approx(seg.origin.lon + 1e-4 * 7200).epsilon(1e-9));
  }
}

TEST_CASE("empty arrival sets are rejected") {
  flow::CorpusSpec spec;
  spec.delta_seconds = -3600;
  CHECK_THROWS_AS(flow::generate_corpus(VectorField::uniform(1, 0), spec), EmptyCorpus);
  spec.arrival_points = {{Vec2{0, 0}, std::nullopt}};
  spec.arrival_times = {};
  CHECK_THROWS_AS(flow::generate_corpus(VectorField::uniform(1, 0), spec), EmptyCorpus);
}

TEST_CASE("generated corpora survive the TrajCsvV1 round trip bit-exactly") {
  flow::CorpusSpec spec;
  spec.arrival_points = {{Vec2{0.25, 0.75}, std::string("cell_1")}};
  spec.arrival_times = {1293883200};
  spec.delta_seconds = -10800;
  spec.fix_interval_seconds = 3600;
  spec.step_seconds = 30.0;
  spec.emit_jacdet = true;
  const traj::TrajectoryCorpus corpus =
      flow::generate_corpus(VectorField::rotation(2e-4, Vec2{0.5, 0.5}), spec);

  std::ostringstream out;
  traj::write_corpus(corpus, out);
  std::istringstream in(out.str());
  const traj::TrajectoryCorpus again = traj::parse_corpus(in);
  REQUIRE_EQ(again.segments.size(), 1);
  const auto& x = corpus.segments[0];
  const auto& y = again.segments[0];
  REQUIRE_EQ(x.fixes.size(), y.fixes.size());
  for (std::size_t i = 0; i < x.fixes.size(); ++i) {
    CHECK_EQ(x.fixes[i].t, y.fixes[i].t);
    CHECK_EQ(x.fixes[i].p.lon, y.fixes[i].p.lon);
    CHECK_EQ(x.fixes[i].p.lat, y.fixes[i].p.lat);
    CHECK_EQ(x.covariates.at("jacdet")[i], y.covariates.at("jacdet")[i]);
  }
  REQUIRE(y.receptor_region.has_value());
  CHECK_EQ(*y.receptor_region, "cell_1");
}
