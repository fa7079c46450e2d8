#pragma once

#include <vector>

#include "ssp3d/object_stack.hpp"

namespace ssp3d {

/// Object error complement: 1 - RMS(a_s |recon| - |truth|) over all slices and
/// pixels, where a_s is the least-squares amplitude scale of slice s. Optional
/// per-slice masks restrict the pixels that count. Throws on shape mismatch.
double oec(const ObjectStack& recon, const ObjectStack& truth, const std::vector<MaskArray>& masks = {});

/// OEC of the slice products (single-slice stacks).
double product_oec(const ObjectStack& recon, const ObjectStack& truth, const MaskArray* mask = nullptr);

/// OEC of one slice.
double slice_oec(const ObjectStack& recon, const ObjectStack& truth, std::size_t slice,
                 const MaskArray* mask = nullptr);

/// 1 - RMS(model/mean(model) - measured/mean(measured)) over all measured
/// pixels of all beamlets. A stack with zero mean normalizes to zero.
double dec_from_intensities(const std::vector<RArray>& model, const std::vector<RArray>& measured,
                            const std::vector<MaskArray>& masks = {});

/// Pearson correlation of two images over an optional mask.
double normalized_cross_correlation(const RArray& a, const RArray& b, const MaskArray* mask = nullptr);

/// Map values affinely so that max -> 1 and min -> 0 (all 1 when constant).
std::vector<double> normalize_unit_range(const std::vector<double>& values);

}  // namespace ssp3d
