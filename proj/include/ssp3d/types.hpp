#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

namespace ssp3d {

using Complex = std::complex<double>;

// Images are stored row-major so that (row, col) matches the detector layout
// and the buffers can be handed to FFTW directly.
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using CArray = Image<Complex>;
using RArray = Image<double>;
using IArray = Image<int>;
using MaskArray = Image<bool>;

/// Transverse position (x, y) in meters. x runs along columns, y along rows.
using Vec2 = Eigen::Vector2d;

/// Integer pixel coordinate.
struct Pixel {
  long row = 0;
  long col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Index of the pixel that sits on the optical axis for an axis of length n.
constexpr long center_index(long n) { return n / 2; }

}  // namespace ssp3d
