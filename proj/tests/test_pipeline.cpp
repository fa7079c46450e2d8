#include "doctest.h"

#include <algorithm>

#include "ssp3d/log.hpp"
#include "ssp3d/pipeline.hpp"

using namespace ssp3d;

namespace {

// Reduced bench: 512 px, 16 beamlets, 128 px windows, axial resolution ~1.7 mm.
RunConfig desk(int iterations) {
  RunConfig c;
  c.optical.detector_rows = c.optical.detector_cols = 512;
  c.optical.delta = 1.5e-2;
  c.optical.slice_spacings = {0.0};
  c.doe = DoeSpec{16, 5 * 5.3e-6, 440 * 5.3e-6};
  c.simulation.segment_size = 128;
  PhantomSpec dots{PhantomKind::dot_field, 141e-6, 1.8e-3, 0.4, 0.0, {}};
  dots.count = 40;
  dots.seed = 11;
  c.phantom = dots;
  c.recon.max_iterations = iterations;
  c.recon.error_threshold = 0.0;
  c.recon.order = BeamletOrder::shuffled;
  c.recon.probe_update_start = iterations + 1;
  return c;
}

}  // namespace

TEST_CASE("bench axial resolution") {
  CHECK(bench_axial_resolution(desk(1)) == doctest::Approx(1681.4e-6).epsilon(1e-4));
  RunConfig paper;
  paper.simulation.segment_size = 300;
  CHECK(bench_axial_resolution(paper) == doctest::Approx(154.19e-6).epsilon(1e-4));
}

TEST_CASE("sweep ordering at desk scale") {
  set_warning_sink([](const std::string&) {});
  const SweepResult r = separation_sweep(desk(150), {0.0, 150e-6, 1e-3}, 1);
  set_warning_sink(nullptr);
  REQUIRE(r.rows.size() == 3);
  MESSAGE("OEC " << r.rows[0].oec << " " << r.rows[1].oec << " " << r.rows[2].oec);
  CHECK(r.rows[2].oec > r.rows[0].oec);
  CHECK(r.rows[0].separation == 0.0);
  CHECK(r.rows[2].separation == 1e-3);
  for (const SweepRow& row : r.rows) {
    CHECK(row.iterations == 150);
    CHECK(row.slice_oec.size() == 2);
  }
  std::vector<double> n;
  for (const SweepRow& row : r.rows) n.push_back(row.dec_normalized);
  CHECK(*std::max_element(n.begin(), n.end()) == 1.0);
  CHECK(*std::min_element(n.begin(), n.end()) == 0.0);
  const auto [lo, hi] = std::minmax_element(r.rows.begin(), r.rows.end(),
                                            [](const SweepRow& a, const SweepRow& b) { return a.dec < b.dec; });
  CHECK(lo->dec_normalized == 0.0);
  CHECK(hi->dec_normalized == 1.0);
}

TEST_CASE("repeated separation gives identical rows") {
  const SweepResult r = separation_sweep(desk(5), {0.5e-3, 0.5e-3}, 2);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].oec == r.rows[1].oec);
  CHECK(r.rows[0].dec == r.rows[1].dec);
  CHECK(r.rows[0].product_oec == r.rows[1].product_oec);
  CHECK(r.rows[0].slice_oec == r.rows[1].slice_oec);
}

TEST_CASE("sweep preconditions") {
  CHECK_THROWS_AS(separation_sweep(desk(1), {1e-3}), std::invalid_argument);
  CHECK_THROWS_AS(separation_sweep(desk(1), {1e-3, -1e-3}), std::invalid_argument);
  RunConfig none = desk(1);
  none.phantom.reset();
  CHECK_THROWS_AS(separation_sweep(none, {0.0, 1e-3}), std::invalid_argument);
}
