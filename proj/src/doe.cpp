#include "ssp3d/doe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ssp3d {

void DoeSpec::validate() const {
  if (n_pinholes < 1) throw std::invalid_argument("DoeSpec: n_pinholes must be >= 1");
  if (!(pinhole_radius > 0.0)) throw std::invalid_argument("DoeSpec: pinhole_radius must be positive");
  if (!(pattern_extent > 2.0 * pinhole_radius))
    throw std::invalid_argument("DoeSpec: pattern_extent must exceed the pinhole diameter");
}

double golden_angle() {
  const double phi = std::numbers::phi;
  return 2.0 * std::numbers::pi / (phi * phi);
}

std::vector<Vec2> fermat_positions(const DoeSpec& spec) {
  spec.validate();
  std::vector<Vec2> out;
  out.reserve(spec.n_pinholes);
  const double theta = golden_angle();
  for (int n = 0; n < spec.n_pinholes; ++n) {
    const double radius = 0.5 * spec.pattern_extent * std::sqrt(double(n) / spec.n_pinholes);
    const double angle = n * theta;
    out.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
  }
  return out;
}

Pixel nearest_pixel(const Vec2& position, Eigen::Index rows, Eigen::Index cols, double pitch) {
  return {center_index(rows) + std::lround(position.y() / pitch),
          center_index(cols) + std::lround(position.x() / pitch)};
}

std::vector<Vec2> rendered_positions(const DoeSpec& spec, Eigen::Index rows, Eigen::Index cols,
                                     double pitch) {
  std::vector<Vec2> out;
  for (const Vec2& p : fermat_positions(spec)) {
    const Pixel px = nearest_pixel(p, rows, cols, pitch);
    out.emplace_back((px.col - center_index(cols)) * pitch, (px.row - center_index(rows)) * pitch);
  }
  return out;
}

ComplexField render_doe(const DoeSpec& spec, Eigen::Index rows, Eigen::Index cols, double pitch,
                        double wavelength) {
  spec.validate();
  if (spec.pinhole_radius < 2.0 * pitch)
    throw std::invalid_argument("render_doe: pinhole radius " + std::to_string(spec.pinhole_radius) +
                                " m is under-resolved by pitch " + std::to_string(pitch) + " m");
  CArray mask = CArray::Zero(rows, cols);
  const double r2 = spec.pinhole_radius * spec.pinhole_radius / (pitch * pitch);
  const long reach = static_cast<long>(std::ceil(spec.pinhole_radius / pitch));
  for (const Vec2& p : fermat_positions(spec)) {
    const Pixel c = nearest_pixel(p, rows, cols, pitch);
    // The disk and its image through the inverting relay must both fit.
    if (c.row - reach < 1 || c.col - reach < 1 || c.row + reach > rows - 1 || c.col + reach > cols - 1)
      throw std::invalid_argument("render_doe: pattern does not fit on the grid");
    for (long dr = -reach; dr <= reach; ++dr)
      for (long dc = -reach; dc <= reach; ++dc)
        if (double(dr * dr + dc * dc) <= r2) mask(c.row + dr, c.col + dc) = 1.0;
  }
  return ComplexField(std::move(mask), pitch, wavelength);
}

std::vector<std::vector<Vec2>> beamlet_slice_positions(const std::vector<Vec2>& detector_positions,
                                                       double delta,
                                                       const std::vector<double>& slice_spacings,
                                                       double focal_length) {
  if (!(focal_length > 0.0)) throw std::invalid_argument("beamlet_slice_positions: f must be positive");
  if (delta < 0.0) throw std::invalid_argument("beamlet_slice_positions: delta must be >= 0");
  std::vector<std::vector<Vec2>> out;
  out.reserve(detector_positions.size());
  for (const Vec2& x : detector_positions) {
    std::vector<Vec2> per_slice;
    per_slice.reserve(slice_spacings.size() + 1);
    per_slice.push_back(x * (delta / focal_length));
    for (double dz : slice_spacings) per_slice.push_back(per_slice.back() + x * (dz / focal_length));
    out.push_back(std::move(per_slice));
  }
  return out;
}

}  // namespace ssp3d
