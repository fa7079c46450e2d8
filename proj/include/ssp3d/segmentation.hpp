#pragma once

#include <cstdint>
#include <vector>

#include "ssp3d/types.hpp"

namespace ssp3d {

/// Continuous detector coordinate in pixels.
struct PixelCoord {
  double row = 0.0;
  double col = 0.0;
};

/// Partition of the detector into per-beamlet regions.
struct SegmentMap {
  IArray labels;                   // -1 = unassigned, otherwise beamlet index
  int segment_size = 0;            // side of the square crop, pixels
  std::vector<Pixel> crop_centers; // one per beamlet
  std::vector<PixelCoord> centroids;

  std::size_t n_segments() const { return crop_centers.size(); }
};

/// Label every pixel with its nearest seed (ties go to the lower index).
IArray nearest_seed_labels(const std::vector<PixelCoord>& seeds, Eigen::Index rows, Eigen::Index cols);

/// Lloyd's algorithm on the pixel lattice: `iterations` rounds of
/// assign-to-nearest then move-to-centroid, followed by a final assignment.
/// Crop centers are the rounded final centroids and the segment size is
/// max_segment_size() of those centers. Throws on duplicate seeds or seeds
/// outside the detector.
SegmentMap centroidal_voronoi(const std::vector<PixelCoord>& seeds, Eigen::Index rows,
                              Eigen::Index cols, int iterations);

/// Largest even side such that squares of that side centered on `centers`
/// are pairwise disjoint and inside the detector. 0 when no square fits.
int max_segment_size(const std::vector<Pixel>& centers, Eigen::Index rows, Eigen::Index cols);

/// Sum over pixels of squared distance to the center of the owning region.
double lloyd_energy(const IArray& labels, const std::vector<PixelCoord>& centers);

/// Region centroids of a labeling; regions without pixels keep `fallback`.
std::vector<PixelCoord> region_centroids(const IArray& labels, const std::vector<PixelCoord>& fallback);

/// Top-left pixel of the crop window for beamlet j.
Pixel crop_origin(const SegmentMap& map, std::size_t j);

/// What to do with crop pixels that fall outside the detector.
enum class EdgePolicy {
  reject,      // throw std::out_of_range naming the beamlet
  unmeasured,  // zero intensity, mask false
};

/// Square crops around each crop center; pixels owned by other beamlets (or
/// unassigned) are zeroed.
std::vector<RArray> extract_segments(const RArray& intensity, const SegmentMap& map,
                                     EdgePolicy edges = EdgePolicy::reject);

/// Per-crop ownership masks: true where the pixel belongs to that beamlet.
std::vector<MaskArray> segment_masks(const SegmentMap& map, EdgePolicy edges = EdgePolicy::reject);

/// FNV-1a digest of labels, crop centers and segment size.
std::uint64_t segment_map_digest(const SegmentMap& map);

}  // namespace ssp3d
