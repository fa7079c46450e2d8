#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssp3d/object_stack.hpp"

namespace ssp3d {

enum class PhantomKind { hair_cross, broken_loop, bar_pair, disk_stack, dot_field };

PhantomKind parse_phantom_kind(const std::string& name);
std::string to_string(PhantomKind kind);

/// Procedural test objects. Features transmit `transmission * exp(i phase)`;
/// everything else is free space.
///
///  hair_cross   vertical bar on slice 0, horizontal bar on slice 1
///  broken_loop  ring split into three 120 degree arcs, one per slice
///  bar_pair     two vertical bars (x = +-size/2) on slice 0, two horizontal
///               bars (y = +-size/2) on slice 1
///  disk_stack   a centered disk of radius `size` on every slice
///  dot_field    `count` Gaussian dots per slice (FWHM `feature_width`) at
///               random positions inside radius `size`, independent per
///               slice; transmission and phase are reached at a dot center
struct PhantomSpec {
  PhantomKind kind = PhantomKind::hair_cross;
  double feature_width = 50e-6;   // bar width or ring thickness, meters
  double size = 1e-3;             // ring/disk radius or bar separation, meters
  double transmission = 0.0;
  double phase = 0.0;             // radians
  std::vector<double> spacings;   // slice spacings, meters
  int count = 40;                 // dot_field only
  std::uint64_t seed = 1;         // dot_field only

  std::size_t n_slices() const;
};

/// Rasterize a phantom; a pixel belongs to a feature iff its center does.
/// Throws std::invalid_argument when a feature is narrower than two pixels
/// or the spacing count does not match the phantom.
ObjectStack make_phantom(const PhantomSpec& spec, Eigen::Index rows, Eigen::Index cols, double pitch);

/// Binary mask (true inside features) of one phantom slice.
MaskArray phantom_feature_mask(const PhantomSpec& spec, std::size_t slice, Eigen::Index rows,
                               Eigen::Index cols, double pitch);

}  // namespace ssp3d
