#pragma once

#include "ssp3d/types.hpp"

namespace ssp3d {

/// Sampled scalar wavefield on a square-pixel grid.
struct ComplexField {
  CArray data;
  double pitch = 0.0;       // meters per pixel
  double wavelength = 0.0;  // vacuum wavelength, meters

  ComplexField() = default;
  /// Throws std::invalid_argument unless rows, cols >= 2 and pitch, wavelength > 0.
  ComplexField(CArray values, double pitch, double wavelength);

  Eigen::Index rows() const { return data.rows(); }
  Eigen::Index cols() const { return data.cols(); }
  double wavenumber() const;
  /// Sum of |value|^2 * pitch^2.
  double energy() const;
};

/// Axial distance and transverse shift applied by one inter-slice step.
/// Negative dz propagates backwards.
struct ShiftSpec {
  double dz = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

/// Spatial frequencies in cycles/meter, standard DFT ordering.
struct FrequencyGrid {
  RArray fx;
  RArray fy;
};

FrequencyGrid frequency_grid(Eigen::Index rows, Eigen::Index cols, double pitch);
FrequencyGrid frequency_grid(const ComplexField& field);

/// Frequency of DFT bin k on an axis of n samples (cycles per sample).
double dft_frequency(Eigen::Index k, Eigen::Index n);

/// sqrt(sum |a-b|^2 / sum |b|^2).
double relative_rms(const CArray& a, const CArray& b);

}  // namespace ssp3d
