#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ssp3d/doe.hpp"

using namespace ssp3d;

TEST_CASE("golden angle") {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::sqrt(2.0 * std::numbers::pi / golden_angle()) == doctest::Approx(phi));
  CHECK(golden_angle() * 180.0 / std::numbers::pi == doctest::Approx(137.5078).epsilon(1e-6));
}

TEST_CASE("Vogel positions") {
  DoeSpec spec{40, 32e-6, 10.85e-3};
  const auto p = fermat_positions(spec);
  REQUIRE(p.size() == 40);
  CHECK(p[0].norm() == 0.0);
  CHECK(p[1].norm() == doctest::Approx(0.8578e-3).epsilon(1e-4));
  CHECK(std::atan2(p[1].y(), p[1].x()) == doctest::Approx(2.39996).epsilon(1e-5));
  CHECK(p[39].norm() == doctest::Approx(0.5 * 10.85e-3 * std::sqrt(39.0 / 40.0)));
  for (const auto& q : p) CHECK(q.norm() < 0.5 * spec.pattern_extent);

  // Nearest-neighbour spacing near the center is the n=0 -> n=1 distance.
  double nearest = 1e9;
  for (std::size_t k = 1; k < p.size(); ++k) nearest = std::min(nearest, (p[k] - p[0]).norm());
  CHECK(nearest == doctest::Approx(0.5 * spec.pattern_extent * std::sqrt(1.0 / 40.0)));
}

TEST_CASE("DOE spec validation") {
  CHECK_THROWS_AS(DoeSpec({0, 1e-6, 1e-3}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(DoeSpec({4, -1e-6, 1e-3}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(DoeSpec({4, 1e-3, 1.5e-3}).validate(), std::invalid_argument);
}

TEST_CASE("render DOE") {
  const double pitch = 5.3e-6;
  SUBCASE("single pinhole disk area") {
    const ComplexField doe = render_doe({1, 32e-6, 0.2e-3}, 64, 64, pitch, 532e-9);
    const double area = doe.data.real().sum();
    const double expected = std::numbers::pi * std::pow(32.0 / 5.3, 2);
    CHECK(area == doctest::Approx(expected).epsilon(0.15));
    CHECK(std::abs(doe.data(32, 32)) == 1.0);
    CHECK(doe.data.imag().abs().maxCoeff() == 0.0);
  }
  SUBCASE("disjoint pinholes add their areas") {
    const DoeSpec many{12, 20e-6, 1.6e-3};
    const DoeSpec one{1, 20e-6, 1.6e-3};
    const double single = render_doe(one, 400, 400, pitch, 532e-9).data.real().sum();
    const ComplexField doe = render_doe(many, 400, 400, pitch, 532e-9);
    CHECK(doe.data.real().sum() == doctest::Approx(12 * single));
    CHECK(((doe.data.real() == 0.0) || (doe.data.real() == 1.0)).all());
  }
  SUBCASE("rendering is deterministic") {
    const DoeSpec spec{16, 15e-6, 1.2e-3};
    CHECK((render_doe(spec, 300, 300, pitch, 532e-9).data == render_doe(spec, 300, 300, pitch, 532e-9).data).all());
  }
  SUBCASE("under-resolved pinholes are rejected") {
    CHECK_THROWS_AS(render_doe({4, 1e-6, 0.1e-3}, 64, 64, pitch, 532e-9), std::invalid_argument);
  }
  SUBCASE("pattern must fit on the grid") {
    CHECK_THROWS_AS(render_doe({40, 32e-6, 10.85e-3}, 256, 256, pitch, 532e-9), std::invalid_argument);
  }
}

TEST_CASE("beamlet slice positions") {
  const std::vector<Vec2> det{{5e-3, 0.0}, {0.0, 0.0}, {-2e-3, 3e-3}};
  SUBCASE("crossover geometry") {
    const auto pos = beamlet_slice_positions(det, 0.0, {1e-3}, 0.05);
    for (const auto& b : pos) CHECK(b[0].norm() == 0.0);
  }
  SUBCASE("per-slice shift") {
    const auto pos = beamlet_slice_positions(det, 5e-3, {1e-3, 2e-3}, 0.05);
    REQUIRE(pos.size() == 3);
    REQUIRE(pos[0].size() == 3);
    CHECK(pos[0][0].x() == doctest::Approx(0.5e-3));
    CHECK((pos[0][1] - pos[0][0]).x() == doctest::Approx(0.1e-3).epsilon(1e-12));
    CHECK((pos[0][2] - pos[0][1]).x() == doctest::Approx(0.2e-3).epsilon(1e-12));
    for (const auto& p : pos[1]) CHECK(p.norm() == 0.0);
    for (std::size_t j = 0; j < det.size(); ++j) {
      const Vec2 d = pos[j][2] - pos[j][1];
      CHECK(std::abs(d.x() - det[j].x() * 2e-3 / 0.05) < 1e-18);
      CHECK(std::abs(d.y() - det[j].y() * 2e-3 / 0.05) < 1e-18);
    }
  }
  SUBCASE("shifts scale with dz and inversely with f") {
    const auto a = beamlet_slice_positions(det, 1e-3, {1e-3}, 0.05);
    const auto b = beamlet_slice_positions(det, 2e-3, {2e-3}, 0.05);
    const auto c = beamlet_slice_positions(det, 1e-3, {1e-3}, 0.10);
    CHECK(b[2][1].x() == doctest::Approx(2.0 * a[2][1].x()));
    CHECK(c[2][1].y() == doctest::Approx(0.5 * a[2][1].y()));
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(beamlet_slice_positions(det, 1e-3, {}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(beamlet_slice_positions(det, -1e-3, {}, 0.05), std::invalid_argument);
  }
}
