#include "ssp3d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssp3d {
namespace {

struct Residual {
  double sum_sq = 0.0;
  double count = 0.0;
};

void check_pair(const CArray& a, const CArray& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("oec: shape mismatch");
}

void accumulate(Residual& acc, const RArray& recon, const RArray& truth, const MaskArray* mask) {
  const RArray weight = mask ? mask->cast<double>().eval() : RArray::Ones(recon.rows(), recon.cols());
  if (mask && (mask->rows() != recon.rows() || mask->cols() != recon.cols()))
    throw std::invalid_argument("oec: mask shape mismatch");
  const double rr = (weight * recon * recon).sum();
  const double scale = rr > 0.0 ? (weight * recon * truth).sum() / rr : 0.0;
  acc.sum_sq += (weight * (scale * recon - truth).square()).sum();
  acc.count += weight.sum();
}

double complement(const Residual& acc) {
  if (acc.count == 0.0) throw std::invalid_argument("oec: no pixels to compare");
  return 1.0 - std::sqrt(acc.sum_sq / acc.count);
}

}  // namespace

double oec(const ObjectStack& recon, const ObjectStack& truth, const std::vector<MaskArray>& masks) {
  if (recon.n_slices() != truth.n_slices()) throw std::invalid_argument("oec: slice count mismatch");
  if (!masks.empty() && masks.size() != recon.n_slices()) throw std::invalid_argument("oec: one mask per slice");
  Residual acc;
  for (std::size_t s = 0; s < recon.n_slices(); ++s) {
    check_pair(recon.slices[s], truth.slices[s]);
    accumulate(acc, recon.slices[s].abs(), truth.slices[s].abs(), masks.empty() ? nullptr : &masks[s]);
  }
  return complement(acc);
}

double product_oec(const ObjectStack& recon, const ObjectStack& truth, const MaskArray* mask) {
  const CArray a = slice_product(recon), b = slice_product(truth);
  check_pair(a, b);
  Residual acc;
  accumulate(acc, a.abs(), b.abs(), mask);
  return complement(acc);
}

double slice_oec(const ObjectStack& recon, const ObjectStack& truth, std::size_t slice, const MaskArray* mask) {
  const CArray& a = recon.slices.at(slice);
  const CArray& b = truth.slices.at(slice);
  check_pair(a, b);
  Residual acc;
  accumulate(acc, a.abs(), b.abs(), mask);
  return complement(acc);
}

double dec_from_intensities(const std::vector<RArray>& model, const std::vector<RArray>& measured,
                            const std::vector<MaskArray>& masks) {
  if (model.size() != measured.size()) throw std::invalid_argument("dec: beamlet count mismatch");
  if (!masks.empty() && masks.size() != measured.size()) throw std::invalid_argument("dec: mask count mismatch");
  double sum_model = 0.0, sum_meas = 0.0, count = 0.0;
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (model[j].rows() != measured[j].rows() || model[j].cols() != measured[j].cols())
      throw std::invalid_argument("dec: pattern shape mismatch");
    const RArray w = masks.empty() ? RArray::Ones(model[j].rows(), model[j].cols()) : masks[j].cast<double>().eval();
    sum_model += (w * model[j]).sum();
    sum_meas += (w * measured[j]).sum();
    count += w.sum();
  }
  if (count == 0.0) throw std::invalid_argument("dec: no measured pixels");
  const double inv_model = sum_model > 0.0 ? count / sum_model : 0.0;
  const double inv_meas = sum_meas > 0.0 ? count / sum_meas : 0.0;
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const RArray w = masks.empty() ? RArray::Ones(model[j].rows(), model[j].cols()) : masks[j].cast<double>().eval();
    sum_sq += (w * (model[j] * inv_model - measured[j] * inv_meas).square()).sum();
  }
  return 1.0 - std::sqrt(sum_sq / count);
}

double normalized_cross_correlation(const RArray& a, const RArray& b, const MaskArray* mask) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("ncc: shape mismatch");
  const RArray w = mask ? mask->cast<double>().eval() : RArray::Ones(a.rows(), a.cols());
  const double n = w.sum();
  if (n == 0.0) return 0.0;
  const double ma = (w * a).sum() / n, mb = (w * b).sum() / n;
  const double cov = (w * (a - ma) * (b - mb)).sum();
  const double va = (w * (a - ma).square()).sum(), vb = (w * (b - mb).square()).sum();
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

std::vector<double> normalize_unit_range(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> out(values.size(), 1.0);
  if (*hi == *lo) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / (*hi - *lo);
  return out;
}

}  // namespace ssp3d
