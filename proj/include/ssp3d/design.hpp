#pragma once

#include <vector>

namespace ssp3d {

/// Minimum resolvable slice separation: 2 lambda f^2 / (X_det X_dif).
/// Throws std::invalid_argument if x_dif > x_det.
double axial_resolution(double wavelength, double focal_length, double x_det, double x_dif);

/// Small-offset approximation of the overlap fraction of two disks of radius
/// r whose centers are d apart: max(0, 1 - 2d / (pi r)).
double overlap_fraction(double beam_radius, double center_distance);

/// Exact lens-intersection area of two disks divided by pi r^2.
double overlap_fraction_exact(double beam_radius, double center_distance);

/// Airy-disk radius 0.61 lambda f / r_p of a beamlet from a pinhole of radius r_p.
double airy_radius(double wavelength, double focal_length, double pinhole_radius);

struct SystemGeometry {
  double wavelength = 532e-9;
  double focal_length = 0.05;
  double x_det = 10.85e-3;
  double x_dif = 1.59e-3;
  double pinhole_radius = 32e-6;
  int n_pinholes = 40;
};

/// Distance from the crossover at which neighbouring beamlets overlap by eta:
///   z(eta) = pi 0.61 dz (X_dif / 2 r_p) sqrt(N_p) (1 - eta)
double axial_bound(double eta, const SystemGeometry& g);

/// Volume of the truncated cone between z(eta_max) and z(eta_min). The cone
/// radius at height z is the half-extent of the beamlet bundle, (X_det/2) z/f.
double imaging_volume(const SystemGeometry& g, double eta_min = 0.6, double eta_max = 0.9);

/// sigma = f lambda / (D dX).
double oversampling(double focal_length, double wavelength, double beam_diameter, double pixel_pitch);

struct OverlapSample {
  double z = 0.0;
  double eta = 0.0;
};

struct DesignReport {
  double axial_resolution = 0.0;       // m
  double transverse_resolution = 0.0;  // m, lambda f / X_dif
  double axial_extent = 0.0;           // m, z(eta_min) - z(eta_max)
  double imaging_volume = 0.0;         // m^3
  double oversampling = 0.0;
  double beam_radius = 0.0;            // m
  std::vector<OverlapSample> overlap_table;
};

DesignReport design_report(const SystemGeometry& g, double pixel_pitch, double eta_min = 0.6,
                           double eta_max = 0.9);

}  // namespace ssp3d
