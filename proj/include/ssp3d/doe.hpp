#pragma once

#include <vector>

#include "ssp3d/field.hpp"

namespace ssp3d {

enum class DoeLayout { fermat_spiral };

/// Pinhole diffractive optical element.
struct DoeSpec {
  int n_pinholes = 40;
  double pinhole_radius = 32e-6;    // meters
  double pattern_extent = 10.85e-3; // spiral diameter, meters
  DoeLayout layout = DoeLayout::fermat_spiral;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

/// Golden angle 2 pi / phi^2 (about 2.39996 rad).
double golden_angle();

/// Vogel-model pinhole centers in meters. Pinhole n sits at radius
/// (extent/2) sqrt(n/N) and angle n * golden_angle(); n = 0 is the origin.
std::vector<Vec2> fermat_positions(const DoeSpec& spec);

/// Pixel holding the pinhole center `position` on a grid with the optical
/// axis at (rows/2, cols/2).
Pixel nearest_pixel(const Vec2& position, Eigen::Index rows, Eigen::Index cols, double pitch);

/// Binary amplitude mask of the DOE. Each pinhole is centered on the pixel
/// nearest to its Vogel position, and a pixel transmits iff its center lies
/// inside a pinhole disk. Throws if pinholes are under-resolved
/// (radius < 2 pitch) or the pattern does not fit on the grid.
ComplexField render_doe(const DoeSpec& spec, Eigen::Index rows, Eigen::Index cols, double pitch,
                        double wavelength);

/// Pinhole centers after snapping to the rendering grid (meters).
std::vector<Vec2> rendered_positions(const DoeSpec& spec, Eigen::Index rows, Eigen::Index cols,
                                     double pitch);

/// Per-beamlet geometry of the single-shot system.
struct BeamletGeometry {
  std::vector<Vec2> detector_positions;            // (X, Y) per beamlet, meters
  std::vector<std::vector<Vec2>> slice_positions;  // [beamlet][slice], meters
  IArray segment_labels;                           // filled by segmentation

  std::size_t n_beamlets() const { return detector_positions.size(); }
  std::size_t n_slices() const {
    return slice_positions.empty() ? 0 : slice_positions.front().size();
  }
};

/// Beamlet centers on each object slice: the first slice sits delta past the
/// crossover, so beamlet j is at X_j delta / f there; every further slice adds
/// X_j dz_s / f.
std::vector<std::vector<Vec2>> beamlet_slice_positions(const std::vector<Vec2>& detector_positions,
                                                       double delta,
                                                       const std::vector<double>& slice_spacings,
                                                       double focal_length);

}  // namespace ssp3d
