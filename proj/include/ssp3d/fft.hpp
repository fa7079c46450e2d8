#pragma once

#include "ssp3d/types.hpp"

namespace ssp3d {

// Unitary 2D DFTs (1/sqrt(rows*cols) on both directions). Zero frequency at
// index (0, 0). Thread-safe: plans are cached behind a mutex and executed with
// the new-array interface.
CArray fft2(const CArray& in);
CArray ifft2(const CArray& in);

// Centered variants: the origin of both domains sits at (rows/2, cols/2).
CArray fft2c(const CArray& in);
CArray ifft2c(const CArray& in);

template <typename Derived>
auto fftshift(const Eigen::ArrayBase<Derived>& in) {
  using Plain = typename Derived::PlainObject;
  const Eigen::Index rows = in.rows(), cols = in.cols();
  const Eigen::Index sr = rows / 2, sc = cols / 2;
  Plain out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      out((r + sr) % rows, (c + sc) % cols) = in(r, c);
  return out;
}

template <typename Derived>
auto ifftshift(const Eigen::ArrayBase<Derived>& in) {
  using Plain = typename Derived::PlainObject;
  const Eigen::Index rows = in.rows(), cols = in.cols();
  const Eigen::Index sr = rows / 2, sc = cols / 2;
  Plain out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      out(r, c) = in((r + sr) % rows, (c + sc) % cols);
  return out;
}

/// Circular shift: out(r + dr, c + dc) = in(r, c).
template <typename Derived>
auto roll(const Eigen::ArrayBase<Derived>& in, Eigen::Index dr, Eigen::Index dc) {
  using Plain = typename Derived::PlainObject;
  const Eigen::Index rows = in.rows(), cols = in.cols();
  auto wrap = [](Eigen::Index v, Eigen::Index n) { return ((v % n) + n) % n; };
  Plain out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      out(wrap(r + dr, rows), wrap(c + dc, cols)) = in(r, c);
  return out;
}

}  // namespace ssp3d
