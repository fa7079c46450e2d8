#include "ssp3d/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ssp3d {
namespace {

void check_seeds(const std::vector<PixelCoord>& seeds, Eigen::Index rows, Eigen::Index cols) {
  if (seeds.empty()) throw std::invalid_argument("centroidal_voronoi: no seeds");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& s = seeds[i];
    if (!(s.row >= 0.0 && s.row <= rows - 1.0 && s.col >= 0.0 && s.col <= cols - 1.0))
      throw std::invalid_argument("centroidal_voronoi: seed " + std::to_string(i) + " lies outside the detector");
    for (std::size_t k = 0; k < i; ++k)
      if (seeds[k].row == s.row && seeds[k].col == s.col)
        throw std::invalid_argument("centroidal_voronoi: duplicate seeds " + std::to_string(k) + " and " +
                                    std::to_string(i));
  }
}

class Fnv1a {
 public:
  void add(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= bytes[i];
      hash_ *= 1099511628211ull;
    }
  }
  template <typename T>
  void add(const T& value) { add(&value, sizeof(T)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ull;
};

}  // namespace

IArray nearest_seed_labels(const std::vector<PixelCoord>& seeds, Eigen::Index rows, Eigen::Index cols) {
  IArray labels(rows, cols);
  std::vector<double> dy2(seeds.size());
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < seeds.size(); ++k) dy2[k] = (r - seeds[k].row) * (r - seeds[k].row);
    for (Eigen::Index c = 0; c < cols; ++c) {
      double best = std::numeric_limits<double>::infinity();
      int owner = -1;
      for (std::size_t k = 0; k < seeds.size(); ++k) {
        const double dx = c - seeds[k].col;
        const double d2 = dy2[k] + dx * dx;
        if (d2 < best) {
          best = d2;
          owner = static_cast<int>(k);
        }
      }
      labels(r, c) = owner;
    }
  }
  return labels;
}

std::vector<PixelCoord> region_centroids(const IArray& labels, const std::vector<PixelCoord>& fallback) {
  std::vector<double> sum_r(fallback.size(), 0.0), sum_c(fallback.size(), 0.0), count(fallback.size(), 0.0);
  for (Eigen::Index r = 0; r < labels.rows(); ++r)
    for (Eigen::Index c = 0; c < labels.cols(); ++c) {
      const int k = labels(r, c);
      if (k < 0) continue;
      sum_r[k] += r;
      sum_c[k] += c;
      count[k] += 1.0;
    }
  std::vector<PixelCoord> out = fallback;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (count[k] > 0.0) out[k] = {sum_r[k] / count[k], sum_c[k] / count[k]};
  return out;
}

double lloyd_energy(const IArray& labels, const std::vector<PixelCoord>& centers) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < labels.rows(); ++r)
    for (Eigen::Index c = 0; c < labels.cols(); ++c) {
      const int k = labels(r, c);
      if (k < 0) continue;
      const double dr = r - centers[k].row, dc = c - centers[k].col;
      total += dr * dr + dc * dc;
    }
  return total;
}

SegmentMap centroidal_voronoi(const std::vector<PixelCoord>& seeds, Eigen::Index rows, Eigen::Index cols,
                              int iterations) {
  if (iterations < 0) throw std::invalid_argument("centroidal_voronoi: iterations must be >= 0");
  check_seeds(seeds, rows, cols);
  std::vector<PixelCoord> centers = seeds;
  for (int it = 0; it < iterations; ++it)
    centers = region_centroids(nearest_seed_labels(centers, rows, cols), centers);

  SegmentMap map;
  map.labels = nearest_seed_labels(centers, rows, cols);
  map.centroids = region_centroids(map.labels, centers);
  for (const auto& c : map.centroids) map.crop_centers.push_back({std::lround(c.row), std::lround(c.col)});
  map.segment_size = max_segment_size(map.crop_centers, rows, cols);
  return map;
}

int max_segment_size(const std::vector<Pixel>& centers, Eigen::Index rows, Eigen::Index cols) {
  long limit = std::numeric_limits<long>::max();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const auto& a = centers[i];
    limit = std::min({limit, 2 * a.row, 2 * (rows - a.row), 2 * a.col, 2 * (cols - a.col)});
    for (std::size_t k = i + 1; k < centers.size(); ++k) {
      const auto& b = centers[k];
      limit = std::min(limit, std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)));
    }
  }
  if (centers.empty() || limit < 2) return 0;
  return static_cast<int>(limit - limit % 2);
}

Pixel crop_origin(const SegmentMap& map, std::size_t j) {
  const long half = map.segment_size / 2;
  return {map.crop_centers.at(j).row - half, map.crop_centers.at(j).col - half};
}

namespace {

// Ownership of each crop pixel; off-detector pixels are never owned.
MaskArray owned_crop(const SegmentMap& map, std::size_t j, EdgePolicy edges, const char* who) {
  const long m = map.segment_size;
  const Pixel o = crop_origin(map, j);
  const long rows = map.labels.rows(), cols = map.labels.cols();
  const bool inside = o.row >= 0 && o.col >= 0 && o.row + m <= rows && o.col + m <= cols;
  if (inside) return map.labels.block(o.row, o.col, m, m) == static_cast<int>(j);
  if (edges == EdgePolicy::reject)
    throw std::out_of_range(std::string(who) + ": crop for beamlet " + std::to_string(j) +
                            " extends past the detector edge");
  MaskArray mask = MaskArray::Constant(m, m, false);
  for (long r = std::max(0L, -o.row); r < std::min(m, rows - o.row); ++r)
    for (long c = std::max(0L, -o.col); c < std::min(m, cols - o.col); ++c)
      mask(r, c) = map.labels(o.row + r, o.col + c) == static_cast<int>(j);
  return mask;
}

}  // namespace

std::vector<RArray> extract_segments(const RArray& intensity, const SegmentMap& map, EdgePolicy edges) {
  if (intensity.rows() != map.labels.rows() || intensity.cols() != map.labels.cols())
    throw std::invalid_argument("extract_segments: intensity shape does not match the segment map");
  const long m = map.segment_size;
  if (m < 2) throw std::invalid_argument("extract_segments: segment size must be >= 2");
  std::vector<RArray> out;
  out.reserve(map.n_segments());
  for (std::size_t j = 0; j < map.n_segments(); ++j) {
    const MaskArray owned = owned_crop(map, j, edges, "extract_segments");
    const Pixel o = crop_origin(map, j);
    RArray crop = RArray::Zero(m, m);
    for (long r = 0; r < m; ++r)
      for (long c = 0; c < m; ++c)
        if (owned(r, c)) crop(r, c) = intensity(o.row + r, o.col + c);
    out.push_back(std::move(crop));
  }
  return out;
}

std::vector<MaskArray> segment_masks(const SegmentMap& map, EdgePolicy edges) {
  std::vector<MaskArray> out;
  out.reserve(map.n_segments());
  for (std::size_t j = 0; j < map.n_segments(); ++j) out.push_back(owned_crop(map, j, edges, "segment_masks"));
  return out;
}

std::uint64_t segment_map_digest(const SegmentMap& map) {
  Fnv1a h;
  const std::int64_t rows = map.labels.rows(), cols = map.labels.cols();
  h.add(rows);
  h.add(cols);
  h.add(map.labels.data(), sizeof(int) * static_cast<std::size_t>(map.labels.size()));
  const std::int32_t m = map.segment_size;
  h.add(m);
  for (const Pixel& p : map.crop_centers) {
    const std::int64_t r = p.row, c = p.col;
    h.add(r);
    h.add(c);
  }
  return h.value();
}

}  // namespace ssp3d
