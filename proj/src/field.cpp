#include "ssp3d/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ssp3d {

ComplexField::ComplexField(CArray values, double pitch_m, double wavelength_m)
    : data(std::move(values)), pitch(pitch_m), wavelength(wavelength_m) {
  if (data.rows() < 2 || data.cols() < 2)
    throw std::invalid_argument("ComplexField: grid must be at least 2x2");
  if (!(pitch > 0.0) || !std::isfinite(pitch))
    throw std::invalid_argument("ComplexField: pitch must be positive");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw std::invalid_argument("ComplexField: wavelength must be positive");
}

double ComplexField::wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

double ComplexField::energy() const { return data.abs2().sum() * pitch * pitch; }

double dft_frequency(Eigen::Index k, Eigen::Index n) {
  const Eigen::Index half = (n + 1) / 2;
  const Eigen::Index signed_k = k < half ? k : k - n;
  return static_cast<double>(signed_k) / static_cast<double>(n);
}

FrequencyGrid frequency_grid(Eigen::Index rows, Eigen::Index cols, double pitch) {
  FrequencyGrid grid{RArray(rows, cols), RArray(rows, cols)};
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double fy = dft_frequency(r, rows) / pitch;
    for (Eigen::Index c = 0; c < cols; ++c) {
      grid.fx(r, c) = dft_frequency(c, cols) / pitch;
      grid.fy(r, c) = fy;
    }
  }
  return grid;
}

FrequencyGrid frequency_grid(const ComplexField& field) {
  return frequency_grid(field.rows(), field.cols(), field.pitch);
}

double relative_rms(const CArray& a, const CArray& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("relative_rms: shape mismatch");
  const double denom = b.abs2().sum();
  const double num = (a - b).abs2().sum();
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
  return std::sqrt(num / denom);
}

}  // namespace ssp3d
