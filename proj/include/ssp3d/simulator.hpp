#pragma once

#include <cstdint>
#include <vector>

#include "ssp3d/doe.hpp"
#include "ssp3d/field.hpp"
#include "ssp3d/object_stack.hpp"
#include "ssp3d/segmentation.hpp"

namespace ssp3d {

/// Single-shot instrument: DOE -> lens f1 -> crossover -> object -> lens f2
/// -> detector. The DOE is imaged onto the detector with magnification f2/f1.
struct OpticalConfig {
  double wavelength = 532e-9;
  double f1 = 0.05;
  double f2 = 0.05;
  long detector_rows = 2048;
  long detector_cols = 2048;
  double detector_pitch = 5.3e-6;
  double delta = 5e-3;                // crossover to first slice
  std::vector<double> slice_spacings; // one entry per slice transition

  void validate() const;
  std::size_t n_slices() const { return slice_spacings.size() + 1; }
  /// Pitch of the DOE plane sampling that maps one-to-one onto detector pixels.
  double doe_pitch() const { return detector_pitch * f1 / f2; }
  /// Object-plane pitch of the full-field simulation grid.
  double object_pitch() const;
};

/// Segmented diffraction data plus everything reconstruction needs.
struct PtychoDataset {
  std::vector<RArray> patterns;            // centered square crops, one per beamlet
  std::vector<MaskArray> masks;            // true where the crop pixel is owned by the beamlet
  std::vector<RArray> reference_patterns;  // DOE-only crops (may be empty)
  BeamletGeometry geometry;
  OpticalConfig config;
  int segment_size = 0;
  std::uint64_t segment_map_digest = 0;

  std::size_t n_beamlets() const { return patterns.size(); }
  /// Throws std::invalid_argument when patterns are malformed or negative.
  void validate() const;
};

struct SimulationOptions {
  int lloyd_iterations = 0;     // 0 keeps each pixel with its nearest beamlet
  int segment_size = 0;         // 0 selects max_segment_size()
  double photon_count = 0.0;    // mean photons per beamlet; 0 = ideal intensities
  std::uint64_t seed = 0;
  bool reference_patterns = true;
  EdgePolicy edges = EdgePolicy::unmeasured;
};

/// Airy-disk diameter 2 * 0.61 lambda f / r_p of one beamlet between the lenses.
double beam_diameter(const OpticalConfig& config, const DoeSpec& doe);

/// Oversampling of each beamlet's diffraction pattern for this instrument.
double system_oversampling(const OpticalConfig& config, const DoeSpec& doe);

/// Far field of the DOE through lens f1, propagated delta to the first slice.
ComplexField illuminate_first_slice(const ComplexField& doe, const OpticalConfig& config);

/// Multiply by each slice in turn, propagating (no transverse shift) between
/// slices. Returns the exit wave of the last slice.
ComplexField forward_full_field(const ComplexField& illumination, const ObjectStack& object);

/// Detector pixel of each beamlet's DOE image (the 4f relay inverts the DOE).
std::vector<Pixel> beamlet_detector_pixels(const DoeSpec& doe, const OpticalConfig& config);

/// Full forward model from DOE and object to a segmented dataset. The object
/// must sit on the full-field grid (detector shape, object_pitch()).
/// Throws when the oversampling is below 1.
PtychoDataset simulate_dataset(const DoeSpec& doe, const ObjectStack& object, const OpticalConfig& config,
                               const SimulationOptions& options = {});

/// Detector intensity of the full field simulation (before segmentation).
RArray simulate_detector(const DoeSpec& doe, const ObjectStack& object, const OpticalConfig& config);

}  // namespace ssp3d
