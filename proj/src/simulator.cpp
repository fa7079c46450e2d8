#include "ssp3d/simulator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "ssp3d/design.hpp"
#include "ssp3d/log.hpp"
#include "ssp3d/propagation.hpp"

namespace ssp3d {

void OpticalConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("OpticalConfig: ") + name + " must be positive");
  };
  positive(wavelength, "wavelength");
  positive(f1, "f1");
  positive(f2, "f2");
  positive(detector_pitch, "detector_pitch");
  if (detector_rows < 2 || detector_cols < 2)
    throw std::invalid_argument("OpticalConfig: detector must be at least 2x2 pixels");
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("OpticalConfig: delta must be >= 0");
  for (double dz : slice_spacings)
    if (!(dz >= 0.0) || !std::isfinite(dz))
      throw std::invalid_argument("OpticalConfig: slice spacings must be >= 0");
}

double OpticalConfig::object_pitch() const {
  return fourier_pitch(wavelength, f1, detector_cols, doe_pitch());
}

void PtychoDataset::validate() const {
  if (patterns.empty()) throw std::invalid_argument("PtychoDataset: no patterns");
  if (geometry.n_beamlets() != patterns.size())
    throw std::invalid_argument("PtychoDataset: one detector position per pattern required");
  if (!masks.empty() && masks.size() != patterns.size())
    throw std::invalid_argument("PtychoDataset: mask count does not match pattern count");
  if (!reference_patterns.empty() && reference_patterns.size() != patterns.size())
    throw std::invalid_argument("PtychoDataset: reference count does not match pattern count");
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    const RArray& p = patterns[j];
    if (p.rows() != segment_size || p.cols() != segment_size)
      throw std::invalid_argument("PtychoDataset: pattern " + std::to_string(j) + " does not match segment size");
    if (!p.allFinite() || (p < 0.0).any())
      throw std::invalid_argument("PtychoDataset: pattern " + std::to_string(j) + " has negative or non-finite values");
    if (!masks.empty() && (masks[j].rows() != segment_size || masks[j].cols() != segment_size))
      throw std::invalid_argument("PtychoDataset: mask " + std::to_string(j) + " does not match segment size");
  }
  config.validate();
}

double beam_diameter(const OpticalConfig& config, const DoeSpec& doe) {
  return 2.0 * 0.61 * config.wavelength * config.f1 / doe.pinhole_radius;
}

double system_oversampling(const OpticalConfig& config, const DoeSpec& doe) {
  return oversampling(config.f2, config.wavelength, beam_diameter(config, doe), config.detector_pitch);
}

ComplexField illuminate_first_slice(const ComplexField& doe, const OpticalConfig& config) {
  return isp(far_field(doe, config.f1), ShiftSpec{config.delta, 0.0, 0.0});
}

ComplexField forward_full_field(const ComplexField& illumination, const ObjectStack& object) {
  object.validate();
  if (object.rows() != illumination.rows() || object.cols() != illumination.cols())
    throw std::invalid_argument("forward_full_field: illumination and object grids differ in shape");
  if (std::abs(object.pitch - illumination.pitch) > 1e-9 * illumination.pitch)
    throw std::invalid_argument("forward_full_field: illumination and object grids differ in pitch");
  ComplexField psi = illumination;
  for (std::size_t s = 0; s < object.n_slices(); ++s) {
    psi.data *= object.slices[s];
    if (s + 1 < object.n_slices() && object.spacings[s] != 0.0)
      psi = isp(psi, ShiftSpec{object.spacings[s], 0.0, 0.0});
  }
  return psi;
}

std::vector<Pixel> beamlet_detector_pixels(const DoeSpec& doe, const OpticalConfig& config) {
  const long rows = config.detector_rows, cols = config.detector_cols;
  std::vector<Pixel> out;
  for (const Vec2& p : fermat_positions(doe)) {
    const Pixel d = nearest_pixel(p, rows, cols, config.doe_pitch());
    out.push_back({2 * center_index(rows) - d.row, 2 * center_index(cols) - d.col});
  }
  return out;
}

namespace {

void check_square(const OpticalConfig& config) {
  if (config.detector_rows != config.detector_cols)
    throw std::invalid_argument("simulate: the full-field simulation needs a square detector");
}

ComplexField render_for(const DoeSpec& doe, const OpticalConfig& config) {
  return render_doe(doe, config.detector_rows, config.detector_cols, config.doe_pitch(), config.wavelength);
}

}  // namespace

RArray simulate_detector(const DoeSpec& doe, const ObjectStack& object, const OpticalConfig& config) {
  config.validate();
  check_square(config);
  const ComplexField illumination = illuminate_first_slice(render_for(doe, config), config);
  return far_field(forward_full_field(illumination, object), config.f2).data.abs2();
}

PtychoDataset simulate_dataset(const DoeSpec& doe, const ObjectStack& object, const OpticalConfig& config,
                               const SimulationOptions& options) {
  config.validate();
  check_square(config);
  if (object.n_slices() != config.n_slices())
    throw std::invalid_argument("simulate_dataset: object slice count does not match the configuration");
  const double sigma = system_oversampling(config, doe);
  if (sigma < 1.0)
    throw std::invalid_argument("simulate_dataset: oversampling " + std::to_string(sigma) +
                                " < 1 would alias the diffraction patterns");
  if (sigma < 2.0) warn("oversampling " + std::to_string(sigma) + " is below 2; reconstruction may fail");

  const ComplexField illumination = illuminate_first_slice(render_for(doe, config), config);
  RArray intensity = far_field(forward_full_field(illumination, object), config.f2).data.abs2();

  if (options.photon_count > 0.0) {
    const double scale = options.photon_count * doe.n_pinholes / intensity.sum();
    std::mt19937_64 rng(options.seed);
    for (Eigen::Index i = 0; i < intensity.size(); ++i) {
      const double mean = intensity(i) * scale;
      intensity(i) = mean > 0.0 ? double(std::poisson_distribution<long long>(mean)(rng)) : 0.0;
    }
  }

  const std::vector<Pixel> beams = beamlet_detector_pixels(doe, config);
  std::vector<PixelCoord> seeds;
  for (const Pixel& p : beams) seeds.push_back({double(p.row), double(p.col)});
  SegmentMap map = centroidal_voronoi(seeds, config.detector_rows, config.detector_cols, options.lloyd_iterations);
  // Crops are centered on each beamlet's own DOE image so that the zero
  // frequency of every crop is that beamlet's carrier.
  map.crop_centers = beams;
  map.segment_size = options.segment_size > 0
                         ? options.segment_size
                         : max_segment_size(beams, config.detector_rows, config.detector_cols);
  if (map.segment_size < 2) throw std::invalid_argument("simulate_dataset: no room for detector segments");

  PtychoDataset data;
  data.config = config;
  data.segment_size = map.segment_size;
  data.patterns = extract_segments(intensity, map, options.edges);
  data.masks = segment_masks(map, options.edges);
  if (options.reference_patterns)
    data.reference_patterns = extract_segments(far_field(illumination, config.f2).data.abs2(), map, options.edges);
  for (const Pixel& p : beams)
    data.geometry.detector_positions.emplace_back((p.col - center_index(config.detector_cols)) * config.detector_pitch,
                                                  (p.row - center_index(config.detector_rows)) * config.detector_pitch);
  data.geometry.slice_positions =
      beamlet_slice_positions(data.geometry.detector_positions, config.delta, config.slice_spacings, config.f2);
  data.segment_map_digest = segment_map_digest(map);
  data.geometry.segment_labels = std::move(map.labels);
  return data;
}

}  // namespace ssp3d
