#include "ssp3d/propagation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ssp3d/fft.hpp"

namespace ssp3d {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CArray defocus_kernel(Eigen::Index rows, Eigen::Index cols, double pitch, double wavelength,
                      double dz) {
  CArray kernel(rows, cols);
  const double k0 = kTwoPi / wavelength;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double ly = wavelength * dft_frequency(r, rows) / pitch;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double lx = wavelength * dft_frequency(c, cols) / pitch;
      const double arg = 1.0 - (lx * lx + ly * ly);
      if (arg >= 0.0)
        kernel(r, c) = std::polar(1.0, k0 * dz * std::sqrt(arg));
      else
        kernel(r, c) = Complex(std::exp(-k0 * std::abs(dz) * std::sqrt(-arg)), 0.0);
    }
  }
  return kernel;
}

// exp(-2 pi i f d) along one axis.
Eigen::ArrayXcd shift_phase(Eigen::Index n, double pitch, double d) {
  Eigen::ArrayXcd phase(n);
  for (Eigen::Index k = 0; k < n; ++k)
    phase(k) = std::polar(1.0, -kTwoPi * dft_frequency(k, n) / pitch * d);
  return phase;
}

void apply_shift_phase(CArray& spectrum, double pitch, double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return;
  const Eigen::ArrayXcd px = shift_phase(spectrum.cols(), pitch, dx);
  const Eigen::ArrayXcd py = shift_phase(spectrum.rows(), pitch, dy);
  for (Eigen::Index r = 0; r < spectrum.rows(); ++r)
    spectrum.row(r) *= py(r) * px.transpose();
}

ComplexField propagate(const ComplexField& psi, const ShiftSpec& shift, bool conjugate) {
  CArray h = transfer_function(psi.rows(), psi.cols(), psi.pitch, psi.wavelength, shift);
  if (conjugate) h = h.conjugate();
  CArray spectrum = fft2(psi.data) * h;
  return ComplexField(ifft2(spectrum), psi.pitch, psi.wavelength);
}

}  // namespace

CArray transfer_function(Eigen::Index rows, Eigen::Index cols, double pitch,
                         double wavelength, const ShiftSpec& shift) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("transfer_function: wavelength must be positive");
  if (!(pitch > 0.0)) throw std::invalid_argument("transfer_function: pitch must be positive");
  CArray h = defocus_kernel(rows, cols, pitch, wavelength, shift.dz);
  apply_shift_phase(h, pitch, shift.dx, shift.dy);
  return h;
}

ComplexField isp(const ComplexField& psi, const ShiftSpec& shift) {
  return propagate(psi, shift, false);
}

ComplexField isp_inverse(const ComplexField& psi, const ShiftSpec& shift) {
  return propagate(psi, shift, true);
}

double fourier_pitch(double wavelength, double focal_length, Eigen::Index n, double pitch) {
  return wavelength * focal_length / (static_cast<double>(n) * pitch);
}

ComplexField far_field(const ComplexField& psi, double focal_length) {
  if (!(focal_length > 0.0)) throw std::invalid_argument("far_field: focal length must be positive");
  if (psi.rows() != psi.cols()) throw std::invalid_argument("far_field: square grid required");
  return ComplexField(fft2c(psi.data),
                      fourier_pitch(psi.wavelength, focal_length, psi.cols(), psi.pitch),
                      psi.wavelength);
}

InterSlicePropagator::InterSlicePropagator(Eigen::Index rows, Eigen::Index cols, double pitch,
                                           double wavelength)
    : rows_(rows), cols_(cols), pitch_(pitch), wavelength_(wavelength) {
  if (rows < 2 || cols < 2 || !(pitch > 0.0) || !(wavelength > 0.0))
    throw std::invalid_argument("InterSlicePropagator: invalid grid");
}

const CArray& InterSlicePropagator::defocus(double dz) const {
  auto it = kernels_.find(dz);
  if (it == kernels_.end())
    it = kernels_.emplace(dz, defocus_kernel(rows_, cols_, pitch_, wavelength_, dz)).first;
  return it->second;
}

CArray InterSlicePropagator::apply(const CArray& psi, const ShiftSpec& shift, bool conjugate) const {
  if (psi.rows() != rows_ || psi.cols() != cols_)
    throw std::invalid_argument("InterSlicePropagator: field shape mismatch");
  CArray spectrum = fft2(psi);
  if (shift.dz != 0.0) {
    const CArray& kernel = defocus(shift.dz);
    spectrum *= conjugate ? kernel.conjugate().eval() : kernel;
  }
  const double sign = conjugate ? -1.0 : 1.0;
  apply_shift_phase(spectrum, pitch_, sign * shift.dx, sign * shift.dy);
  return ifft2(spectrum);
}

CArray InterSlicePropagator::forward(const CArray& psi, const ShiftSpec& shift) const {
  return apply(psi, shift, false);
}

CArray InterSlicePropagator::inverse(const CArray& psi, const ShiftSpec& shift) const {
  return apply(psi, shift, true);
}

}  // namespace ssp3d
