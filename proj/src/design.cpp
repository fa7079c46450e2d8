#include "ssp3d/design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ssp3d {

double axial_resolution(double wavelength, double focal_length, double x_det, double x_dif) {
  if (!(wavelength > 0.0 && focal_length > 0.0 && x_det > 0.0 && x_dif > 0.0))
    throw std::invalid_argument("axial_resolution: all inputs must be positive");
  if (x_dif > x_det)
    throw std::invalid_argument("axial_resolution: a segment cannot be larger than the detector");
  return 2.0 * wavelength * focal_length * focal_length / (x_det * x_dif);
}

double overlap_fraction(double beam_radius, double center_distance) {
  if (!(beam_radius > 0.0)) throw std::invalid_argument("overlap_fraction: radius must be positive");
  if (center_distance < 0.0) throw std::invalid_argument("overlap_fraction: distance must be >= 0");
  return std::max(0.0, 1.0 - 2.0 * center_distance / (std::numbers::pi * beam_radius));
}

double overlap_fraction_exact(double beam_radius, double center_distance) {
  const double r = beam_radius, d = center_distance;
  if (d >= 2.0 * r) return 0.0;
  const double area = 2.0 * r * r * std::acos(d / (2.0 * r)) - 0.5 * d * std::sqrt(4.0 * r * r - d * d);
  return area / (std::numbers::pi * r * r);
}

double airy_radius(double wavelength, double focal_length, double pinhole_radius) {
  return 0.61 * wavelength * focal_length / pinhole_radius;
}

double axial_bound(double eta, const SystemGeometry& g) {
  const double dz = axial_resolution(g.wavelength, g.focal_length, g.x_det, g.x_dif);
  return std::numbers::pi * 0.61 * dz * (g.x_dif / (2.0 * g.pinhole_radius)) *
         std::sqrt(static_cast<double>(g.n_pinholes)) * (1.0 - eta);
}

double imaging_volume(const SystemGeometry& g, double eta_min, double eta_max) {
  if (eta_min > eta_max) throw std::invalid_argument("imaging_volume: eta_min must not exceed eta_max");
  const double z_near = axial_bound(eta_max, g);
  const double z_far = axial_bound(eta_min, g);
  const double r_near = 0.5 * g.x_det * z_near / g.focal_length;
  const double r_far = 0.5 * g.x_det * z_far / g.focal_length;
  return std::numbers::pi * (z_far - z_near) / 3.0 * (r_near * r_near + r_near * r_far + r_far * r_far);
}

double oversampling(double focal_length, double wavelength, double beam_diameter, double pixel_pitch) {
  if (!(focal_length > 0.0 && wavelength > 0.0 && beam_diameter > 0.0 && pixel_pitch > 0.0))
    throw std::invalid_argument("oversampling: all inputs must be positive");
  return focal_length * wavelength / (beam_diameter * pixel_pitch);
}

DesignReport design_report(const SystemGeometry& g, double pixel_pitch, double eta_min, double eta_max) {
  DesignReport report;
  report.axial_resolution = axial_resolution(g.wavelength, g.focal_length, g.x_det, g.x_dif);
  report.transverse_resolution = g.wavelength * g.focal_length / g.x_dif;
  report.axial_extent = axial_bound(eta_min, g) - axial_bound(eta_max, g);
  report.imaging_volume = imaging_volume(g, eta_min, eta_max);
  report.beam_radius = airy_radius(g.wavelength, g.focal_length, g.pinhole_radius);
  report.oversampling = oversampling(g.focal_length, g.wavelength, 2.0 * report.beam_radius, pixel_pitch);
  for (int k = 0; k <= 10; ++k) {
    const double eta = 1.0 - 0.1 * k;
    report.overlap_table.push_back({axial_bound(eta, g), eta});
  }
  return report;
}

}  // namespace ssp3d
