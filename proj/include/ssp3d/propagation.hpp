#pragma once

#include <map>

#include "ssp3d/field.hpp"

namespace ssp3d {

/// Angular-spectrum transfer function with an added linear phase for the
/// transverse shift, sampled on the unshifted DFT frequency grid:
///
///   H = exp(i k dz sqrt(1 - (lambda f)^2)) * exp(-2 pi i (fx dx + fy dy))
///
/// Evanescent components decay as exp(-k |dz| sqrt((lambda f)^2 - 1)) for
/// either sign of dz, so neither H nor conj(H) ever amplifies.
CArray transfer_function(Eigen::Index rows, Eigen::Index cols, double pitch,
                         double wavelength, const ShiftSpec& shift);

/// Inter-slice propagator: F^-1{ F{psi} H }.
ComplexField isp(const ComplexField& psi, const ShiftSpec& shift);

/// Inverse inter-slice propagator: F^-1{ F{psi} conj(H) }.
ComplexField isp_inverse(const ComplexField& psi, const ShiftSpec& shift);

/// Lens Fourier transform: centered unitary DFT of psi. The output pitch is
/// lambda f / (N pitch). Requires a square grid.
ComplexField far_field(const ComplexField& psi, double focal_length);

/// Pitch of the Fourier plane of a lens of focal length f for a square grid
/// of n samples at the given pitch.
double fourier_pitch(double wavelength, double focal_length, Eigen::Index n, double pitch);

/// Repeated ISP application on a fixed grid. Defocus kernels are cached per
/// dz; the linear-phase part is built separably on each call.
///
/// Not thread-safe (the kernel cache is mutable); use one instance per thread.
class InterSlicePropagator {
 public:
  InterSlicePropagator(Eigen::Index rows, Eigen::Index cols, double pitch, double wavelength);

  CArray forward(const CArray& psi, const ShiftSpec& shift) const;
  CArray inverse(const CArray& psi, const ShiftSpec& shift) const;

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  double pitch() const { return pitch_; }
  double wavelength() const { return wavelength_; }

 private:
  const CArray& defocus(double dz) const;
  CArray apply(const CArray& psi, const ShiftSpec& shift, bool conjugate) const;

  Eigen::Index rows_, cols_;
  double pitch_, wavelength_;
  mutable std::map<double, CArray> kernels_;
};

}  // namespace ssp3d
