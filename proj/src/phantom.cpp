#include "ssp3d/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <numbers>
#include <stdexcept>

namespace ssp3d {

void ObjectStack::validate() const {
  if (slices.empty()) throw std::invalid_argument("ObjectStack: no slices");
  if (spacings.size() + 1 != slices.size())
    throw std::invalid_argument("ObjectStack: need exactly n_slices - 1 spacings");
  if (!(pitch > 0.0)) throw std::invalid_argument("ObjectStack: pitch must be positive");
  for (const CArray& s : slices)
    if (s.rows() != rows() || s.cols() != cols())
      throw std::invalid_argument("ObjectStack: slices must share one grid");
}

ObjectStack unity_stack(std::size_t n_slices, Eigen::Index rows, Eigen::Index cols, double pitch,
                        std::vector<double> spacings) {
  ObjectStack stack;
  stack.slices.assign(n_slices, CArray::Ones(rows, cols));
  stack.spacings = std::move(spacings);
  stack.pitch = pitch;
  stack.validate();
  return stack;
}

CArray slice_product(const ObjectStack& stack) {
  stack.validate();
  CArray out = stack.slices.front();
  for (std::size_t s = 1; s < stack.slices.size(); ++s) out *= stack.slices[s];
  return out;
}

PhantomKind parse_phantom_kind(const std::string& name) {
  if (name == "hair_cross") return PhantomKind::hair_cross;
  if (name == "broken_loop") return PhantomKind::broken_loop;
  if (name == "bar_pair") return PhantomKind::bar_pair;
  if (name == "disk_stack") return PhantomKind::disk_stack;
  if (name == "dot_field") return PhantomKind::dot_field;
  throw std::invalid_argument("unknown phantom kind '" + name + "'");
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::hair_cross: return "hair_cross";
    case PhantomKind::broken_loop: return "broken_loop";
    case PhantomKind::bar_pair: return "bar_pair";
    case PhantomKind::disk_stack: return "disk_stack";
    case PhantomKind::dot_field: return "dot_field";
  }
  return "unknown";
}

std::size_t PhantomSpec::n_slices() const {
  switch (kind) {
    case PhantomKind::hair_cross:
    case PhantomKind::bar_pair: return 2;
    case PhantomKind::broken_loop: return 3;
    case PhantomKind::disk_stack:
    case PhantomKind::dot_field: return spacings.size() + 1;
  }
  return 0;
}

namespace {

// Half-open band [c - half, c + half) with a guard against rounding at pixel centers.
bool in_band(double v, double c, double half, double eps) {
  return v - c >= -half - eps && v - c < half - eps;
}

bool inside_feature(const PhantomSpec& spec, std::size_t slice, double x, double y, double pitch) {
  const double half = 0.5 * spec.feature_width;
  const double eps = 1e-6 * pitch;
  switch (spec.kind) {
    case PhantomKind::hair_cross:
      return in_band(slice == 0 ? x : y, 0.0, half, eps);
    case PhantomKind::bar_pair: {
      const double a = 0.5 * spec.size;
      const double v = slice == 0 ? x : y;
      return in_band(v, a, half, eps) || in_band(v, -a, half, eps);
    }
    case PhantomKind::broken_loop: {
      const double r = std::hypot(x, y);
      if (std::abs(r - spec.size) > half) return false;
      double angle = std::atan2(y, x);
      if (angle < 0.0) angle += 2.0 * std::numbers::pi;
      const auto sector = std::min<std::size_t>(2, static_cast<std::size_t>(angle / (2.0 * std::numbers::pi / 3.0)));
      return sector == slice;
    }
    case PhantomKind::disk_stack:
      return std::hypot(x, y) <= spec.size;
    case PhantomKind::dot_field: break;
  }
  return false;
}

void check_spec(const PhantomSpec& spec, double pitch) {
  if (!(pitch > 0.0)) throw std::invalid_argument("make_phantom: pitch must be positive");
  const bool needs_width = spec.kind != PhantomKind::disk_stack;
  const double smallest = needs_width ? spec.feature_width : spec.size;
  if (!(smallest >= 2.0 * pitch))
    throw std::invalid_argument("make_phantom: feature of " + std::to_string(smallest) +
                                " m is smaller than two pixels of " + std::to_string(pitch) + " m");
  if (spec.kind == PhantomKind::dot_field && (spec.count < 0 || !(spec.size > 0.0)))
    throw std::invalid_argument("make_phantom: dot_field needs a non-negative count and a positive radius");
  const std::size_t expected = spec.n_slices();
  if (spec.spacings.size() + 1 != expected)
    throw std::invalid_argument("make_phantom: " + to_string(spec.kind) + " needs " +
                                std::to_string(expected - 1) + " slice spacing(s)");
}

struct Dot {
  double x, y;
};

std::vector<std::vector<Dot>> dot_positions(const PhantomSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<Dot>> dots(spec.n_slices());
  for (auto& slice : dots)
    while (static_cast<int>(slice.size()) < spec.count) {
      const double x = spec.size * u(rng), y = spec.size * u(rng);
      if (std::hypot(x, y) < spec.size) slice.push_back({x, y});
    }
  return dots;
}

// Summed dot profile on one slice, clipped to 1 where dots overlap.
RArray dot_profile(const PhantomSpec& spec, const std::vector<Dot>& dots, Eigen::Index rows, Eigen::Index cols,
                   double pitch) {
  const double sigma = spec.feature_width / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double reach = 5.0 * sigma;
  RArray v = RArray::Zero(rows, cols);
  for (const Dot& d : dots) {
    const auto lo_c = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((d.x - reach) / pitch)) + center_index(cols));
    const auto hi_c = std::min<Eigen::Index>(cols - 1, static_cast<Eigen::Index>(std::ceil((d.x + reach) / pitch)) + center_index(cols));
    const auto lo_r = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((d.y - reach) / pitch)) + center_index(rows));
    const auto hi_r = std::min<Eigen::Index>(rows - 1, static_cast<Eigen::Index>(std::ceil((d.y + reach) / pitch)) + center_index(rows));
    for (Eigen::Index r = lo_r; r <= hi_r; ++r)
      for (Eigen::Index c = lo_c; c <= hi_c; ++c) {
        const double dx = (c - center_index(cols)) * pitch - d.x, dy = (r - center_index(rows)) * pitch - d.y;
        v(r, c) += std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      }
  }
  return v.min(1.0);
}

}  // namespace

MaskArray phantom_feature_mask(const PhantomSpec& spec, std::size_t slice, Eigen::Index rows,
                               Eigen::Index cols, double pitch) {
  check_spec(spec, pitch);
  if (spec.kind == PhantomKind::dot_field) {
    if (slice >= spec.n_slices()) throw std::out_of_range("phantom_feature_mask: slice out of range");
    return dot_profile(spec, dot_positions(spec)[slice], rows, cols, pitch) >= 0.5;
  }
  MaskArray mask(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double y = (r - center_index(rows)) * pitch;
    for (Eigen::Index c = 0; c < cols; ++c)
      mask(r, c) = inside_feature(spec, slice, (c - center_index(cols)) * pitch, y, pitch);
  }
  return mask;
}

ObjectStack make_phantom(const PhantomSpec& spec, Eigen::Index rows, Eigen::Index cols, double pitch) {
  check_spec(spec, pitch);
  const Complex feature = std::polar(spec.transmission, spec.phase);
  ObjectStack stack;
  stack.pitch = pitch;
  stack.spacings = spec.spacings;
  if (spec.kind == PhantomKind::dot_field) {
    const auto dots = dot_positions(spec);
    for (const auto& slice : dots) {
      const RArray v = dot_profile(spec, slice, rows, cols, pitch);
      const RArray amplitude = 1.0 - (1.0 - spec.transmission) * v;
      const RArray phase = spec.phase * v;
      stack.slices.push_back(amplitude.cast<Complex>() * (Complex(0.0, 1.0) * phase.cast<Complex>()).exp());
    }
    stack.validate();
    return stack;
  }
  for (std::size_t s = 0; s < spec.n_slices(); ++s) {
    const MaskArray mask = phantom_feature_mask(spec, s, rows, cols, pitch);
    stack.slices.push_back(mask.select(CArray::Constant(rows, cols, feature), CArray::Ones(rows, cols)));
  }
  stack.validate();
  return stack;
}

}  // namespace ssp3d
