#pragma once

#include <vector>

#include "ssp3d/types.hpp"

namespace ssp3d {

/// Multi-slice object: complex transmission per slice on one common grid.
struct ObjectStack {
  std::vector<CArray> slices;
  std::vector<double> spacings;  // meters between consecutive slices
  double pitch = 0.0;            // meters per pixel

  std::size_t n_slices() const { return slices.size(); }
  Eigen::Index rows() const { return slices.empty() ? 0 : slices.front().rows(); }
  Eigen::Index cols() const { return slices.empty() ? 0 : slices.front().cols(); }

  /// Throws std::invalid_argument on empty stacks, mismatched shapes or a
  /// spacing count other than n_slices - 1.
  void validate() const;
};

/// Free-space object: every slice is 1 + 0i.
ObjectStack unity_stack(std::size_t n_slices, Eigen::Index rows, Eigen::Index cols, double pitch,
                        std::vector<double> spacings);

/// Pointwise product of all slices (the projection-approximation object).
CArray slice_product(const ObjectStack& stack);

}  // namespace ssp3d
