#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fixtures.hpp"
#include "ssp3d/fft.hpp"
#include "ssp3d/phantom.hpp"
#include "ssp3d/reconstruction.hpp"
#include "ssp3d/simulator.hpp"

using namespace ssp3d;
using namespace fixtures;

namespace {

constexpr double pi = std::numbers::pi;

// Circular centroid along both axes; exact for a shifted symmetric pattern.
Vec2 circular_centroid(const RArray& intensity, double pitch) {
  const auto rows = intensity.rows(), cols = intensity.cols();
  std::complex<double> sx = 0.0, sy = 0.0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      sx += intensity(r, c) * std::polar(1.0, 2.0 * pi * double(c - cols / 2) / cols);
      sy += intensity(r, c) * std::polar(1.0, 2.0 * pi * double(r - rows / 2) / rows);
    }
  return {std::arg(sx) * cols * pitch / (2.0 * pi), std::arg(sy) * rows * pitch / (2.0 * pi)};
}

}  // namespace

TEST_CASE("illumination with delta = 0 is the Fourier transform of the DOE") {
  OpticalConfig c = narrow_config(0.0, {});
  const ComplexField doe = render_doe(narrow_doe(), 256, 256, c.doe_pitch(), c.wavelength);
  const ComplexField ill = illuminate_first_slice(doe, c);
  CHECK((ill.data - fft2c(doe.data)).abs().maxCoeff() < 1e-15);
  CHECK(ill.pitch == doctest::Approx(c.object_pitch()));
}

TEST_CASE("single pinhole Airy pattern") {
  OpticalConfig c;
  c.detector_rows = c.detector_cols = 2048;
  c.delta = 0.0;
  const DoeSpec pin{1, 32e-6, 0.1e-3};
  const ComplexField ill = illuminate_first_slice(render_doe(pin, 2048, 2048, c.doe_pitch(), c.wavelength), c);
  const RArray row = ill.data.row(1024).abs2();
  Eigen::Index k = 1025;
  while (k < 2047 && !(row(k) < row(k - 1) && row(k) <= row(k + 1))) ++k;
  const double zero = (k - 1024) * ill.pitch;
  MESSAGE("first minimum at " << zero * 1e6 << " um, pitch " << ill.pitch * 1e6 << " um");
  CHECK(zero == doctest::Approx(0.61 * c.wavelength * c.f1 / 32e-6).epsilon(0.02));
}

TEST_CASE("beamlet centroids follow the slice positions") {
  OpticalConfig c;
  c.delta = 5e-3;
  const DoeSpec doe;
  const ComplexField full = render_doe(doe, 2048, 2048, c.doe_pitch(), c.wavelength);
  const auto snapped = rendered_positions(doe, 2048, 2048, c.doe_pitch());
  const auto beams = beamlet_detector_pixels(doe, c);
  std::vector<Vec2> det;
  for (const Pixel& p : beams) det.emplace_back((p.col - 1024) * c.detector_pitch, (p.row - 1024) * c.detector_pitch);
  const auto expected = beamlet_slice_positions(det, c.delta, {}, c.f2);
  for (std::size_t j : {0u, 7u, 19u, 39u}) {
    // Keep only pinhole j.
    ComplexField one = full;
    const long pr = std::lround(snapped[j].y() / c.doe_pitch()) + 1024;
    const long pc = std::lround(snapped[j].x() / c.doe_pitch()) + 1024;
    for (Eigen::Index r = 0; r < 2048; ++r)
      for (Eigen::Index col = 0; col < 2048; ++col)
        if (std::hypot(double(r - pr), double(col - pc)) > 10.0) one.data(r, col) = 0.0;
    const ComplexField ill = illuminate_first_slice(one, c);
    const Vec2 centroid = circular_centroid(ill.data.abs2(), ill.pitch);
    // Paraxial positions against the reconstruction-grid pixel (X_dif = 300 px).
    const double window_pixel = window_pitch(c, 300);
    const double err = (centroid - expected[j][0]).norm() / window_pixel;
    MESSAGE("beamlet " << j << ": centroid error " << err << " window px");
    CHECK(err < 1.0);
    // Exact tilt sin(theta) = X / f, displacement delta tan(theta).
    const double rho = det[j].norm() / c.f2;
    const Vec2 exact = rho == 0.0 ? Vec2(0.0, 0.0) : Vec2(det[j] / det[j].norm() * c.delta * rho / std::sqrt(1 - rho * rho));
    CHECK((centroid - exact).norm() < 0.05 * ill.pitch);
  }
}

TEST_CASE("free-space object reproduces the DOE image") {
  const OpticalConfig c = narrow_config(5e-3, {3e-3});
  const ObjectStack free = unity_stack(2, 256, 256, c.object_pitch(), {3e-3});
  const PtychoDataset data = simulate_dataset(narrow_doe(), free, c);
  const ComplexField disk = render_doe({1, 4 * 5.3e-6, 9 * 5.3e-6}, data.segment_size, data.segment_size,
                                       c.doe_pitch(), c.wavelength);
  for (std::size_t j = 0; j < data.n_beamlets(); ++j) {
    CHECK((data.patterns[j] - disk.data.abs2()).abs().maxCoeff() < 1e-12);
    CHECK((data.patterns[j] - data.reference_patterns[j]).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("full-field forward model") {
  const OpticalConfig c = narrow_config(5e-3, {2e-3, 1e-3});
  const ComplexField ill = illuminate_first_slice(render_doe(narrow_doe(), 256, 256, c.doe_pitch(), c.wavelength), c);
  SUBCASE("free space equals one propagation by the total spacing") {
    const ObjectStack free = unity_stack(3, 256, 256, c.object_pitch(), {2e-3, 1e-3});
    const ComplexField out = forward_full_field(ill, free);
    CHECK(relative_rms(out.data, isp(ill, {3e-3, 0.0, 0.0}).data) < 1e-11);
  }
  SUBCASE("single slice is the projection") {
    ObjectStack one = sample_object(1, 256, c.object_pitch(), {}, 0.05);
    CHECK((forward_full_field(ill, one).data - ill.data * one.slices[0]).abs().maxCoeff() == 0.0);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(forward_full_field(ill, unity_stack(1, 128, 128, c.object_pitch(), {})), std::invalid_argument);
  }
  SUBCASE("detector energy equals exit-wave energy") {
    const ObjectStack obj = sample_object(3, 256, c.object_pitch(), {2e-3, 1e-3}, 0.05);
    const ComplexField exit = forward_full_field(ill, obj);
    const RArray det = simulate_detector(narrow_doe(), obj, c);
    CHECK(det.sum() == doctest::Approx(exit.data.abs2().sum()).epsilon(1e-12));
  }
}

TEST_CASE("windowed model matches the full-field simulation") {
  SUBCASE("two slices 3 mm apart") {
    const WindowedAgreement a = windowed_vs_full(narrow_config(5e-3, {3e-3}));
    MESSAGE("worst segment relative RMS " << a.worst);
    CHECK(a.worst < 1e-6);
    CHECK(a.owned_pixels_match);
  }
  SUBCASE("three slices with whole-pixel walk-off") {
    const WindowedAgreement a = windowed_vs_full(narrow_config(1.5, {2.0, 1.0}));
    MESSAGE("worst segment relative RMS " << a.worst);
    CHECK(a.worst < 1e-6);
    CHECK(a.owned_pixels_match);
  }
}

TEST_CASE("simulation is deterministic") {
  const OpticalConfig c = narrow_config(5e-3, {3e-3});
  const ObjectStack obj = sample_object(2, 256, c.object_pitch(), {3e-3}, 0.05);
  const PtychoDataset a = simulate_dataset(narrow_doe(), obj, c);
  const PtychoDataset b = simulate_dataset(narrow_doe(), obj, c);
  REQUIRE(a.n_beamlets() == 6);
  CHECK(a.segment_map_digest == b.segment_map_digest);
  for (std::size_t j = 0; j < a.n_beamlets(); ++j) CHECK((a.patterns[j] == b.patterns[j]).all());
  const PtychoDataset n1 = simulate_dataset(narrow_doe(), obj, c, {0, 0, 1e4, 7, false});
  const PtychoDataset n2 = simulate_dataset(narrow_doe(), obj, c, {0, 0, 1e4, 7, false});
  for (std::size_t j = 0; j < a.n_beamlets(); ++j) {
    CHECK((n1.patterns[j] == n2.patterns[j]).all());
    CHECK((n1.patterns[j] == n1.patterns[j].round()).all());
  }
}

TEST_CASE("oversampling guard") {
  OpticalConfig c;
  CHECK(system_oversampling(c, DoeSpec{}) == doctest::Approx(4.95).epsilon(0.01));
  OpticalConfig bad = narrow_config(5e-3, {3e-3});
  bad.f2 = 0.1;
  const ObjectStack obj = unity_stack(2, 256, 256, bad.object_pitch(), {3e-3});
  CHECK(system_oversampling(bad, narrow_doe()) < 1.0);
  CHECK_THROWS_AS(simulate_dataset(narrow_doe(), obj, bad), std::invalid_argument);
  OpticalConfig mismatch = narrow_config(5e-3, {3e-3, 1e-3});
  CHECK_THROWS_AS(simulate_dataset(narrow_doe(), obj, mismatch), std::invalid_argument);
}
