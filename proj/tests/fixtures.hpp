#pragma once

#include <cmath>
#include <algorithm>
#include <numbers>
#include <vector>

#include "ssp3d/object_stack.hpp"
#include "ssp3d/reconstruction.hpp"
#include "ssp3d/simulator.hpp"

namespace fixtures {

using namespace ssp3d;

// 256^2 bench with nine beamlets, f = 5 cm, sigma ~ 3.3.
inline OpticalConfig small_config(double delta, std::vector<double> spacings) {
  OpticalConfig c;
  c.detector_rows = c.detector_cols = 256;
  c.delta = delta;
  c.slice_spacings = std::move(spacings);
  return c;
}

inline DoeSpec small_doe() { return {9, 4 * 5.3e-6, 200 * 5.3e-6}; }

// Smooth complex transmission, periodic over `period`.
inline Complex smooth_object(std::size_t s, double x, double y, double period) {
  const double u = 2.0 * std::numbers::pi * x / period, v = 2.0 * std::numbers::pi * y / period;
  switch (s % 3) {
    case 0: return Complex(0.8 + 0.15 * std::cos(2 * u + 0.3), 0.1 * std::sin(3 * v));
    case 1: return Complex(0.9 - 0.05 * std::cos(4 * u), 0.1 * std::cos(u + 2 * v));
    default: return Complex(0.85 + 0.1 * std::sin(u - v), -0.08 * std::cos(3 * u));
  }
}

inline ObjectStack smooth_stack(std::size_t n_slices, Eigen::Index n, double pitch,
                                const std::vector<double>& spacings, double period) {
  ObjectStack obj = unity_stack(n_slices, n, n, pitch, spacings);
  for (std::size_t s = 0; s < n_slices; ++s)
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        obj.slices[s](r, c) = smooth_object(s, (c - n / 2) * pitch, (r - n / 2) * pitch, period);
  return obj;
}

// Small-angle instrument with a band-limited object. Every beamlet's detector
// spectrum then has compact support, so the windowed model can be exact.
inline OpticalConfig narrow_config(double delta, std::vector<double> spacings) {
  OpticalConfig c;
  c.f1 = c.f2 = 0.5;
  c.detector_rows = c.detector_cols = 256;
  c.delta = delta;
  c.slice_spacings = std::move(spacings);
  return c;
}

inline DoeSpec narrow_doe() { return {6, 4 * 5.3e-6, 160 * 5.3e-6}; }

// Finite trigonometric polynomial with period L (the window extent).
inline Complex trig_object(std::size_t s, double x, double y, double L) {
  const double u = 2.0 * std::numbers::pi * x / L, v = 2.0 * std::numbers::pi * y / L;
  if (s == 0) return Complex(0.8 + 0.15 * std::cos(2 * u + 0.3), 0.1 * std::sin(3 * v));
  if (s == 1) return Complex(0.9 - 0.05 * std::cos(4 * u), 0.1 * std::cos(u + 2 * v));
  return Complex(0.85 + 0.1 * std::sin(u - v), -0.08 * std::cos(3 * u));
}

inline ObjectStack sample_object(std::size_t n_slices, Eigen::Index n, double pitch, const std::vector<double>& spacings,
                          double L) {
  ObjectStack obj = unity_stack(n_slices, n, n, pitch, spacings);
  for (std::size_t s = 0; s < n_slices; ++s)
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        obj.slices[s](r, c) = trig_object(s, (c - n / 2) * pitch, (r - n / 2) * pitch, L);
  return obj;
}

struct WindowedAgreement {
  double worst = 0.0;               // worst per-segment relative RMS
  bool owned_pixels_match = true;   // dataset pixels equal the detector crop
};

// Windowed model against crops of the full-field detector image.
inline WindowedAgreement windowed_vs_full(const OpticalConfig& config) {
  const DoeSpec doe = narrow_doe();
  const double L = config.wavelength * config.f2 / config.detector_pitch;
  const std::size_t ns = config.n_slices();
  const ObjectStack full = sample_object(ns, config.detector_rows, config.object_pitch(), config.slice_spacings, L);
  const PtychoDataset data = simulate_dataset(doe, full, config, {0, 0, 0.0, 0, false});
  const RArray detector = simulate_detector(doe, full, config);

  const ReconGeometry g = make_recon_geometry(data);
  const MultiSliceModel model(g);
  const ObjectStack windowed = sample_object(ns, g.object_rows, g.pitch, config.slice_spacings, L);
  const CArray probe = ideal_probe(doe, config, data.segment_size);
  const auto beams = beamlet_detector_pixels(doe, config);
  const long m = data.segment_size;
  WindowedAgreement out;
  for (std::size_t j = 0; j < data.n_beamlets(); ++j) {
    const RArray crop = detector.block(beams[j].row - m / 2, beams[j].col - m / 2, m, m);
    const RArray model_crop = model.intensity(probe, windowed, j);
    out.worst = std::max(out.worst, std::sqrt((model_crop - crop).square().sum() / crop.square().sum()));
    if ((data.masks[j].select(crop, 0.0) - data.patterns[j]).abs().maxCoeff() != 0.0) out.owned_pixels_match = false;
  }
  return out;
}

// Replace a dataset's patterns with the windowed model's own prediction.
inline void make_consistent(PtychoDataset& data, const MultiSliceModel& model, const CArray& probe,
                            const ObjectStack& object) {
  for (std::size_t j = 0; j < data.n_beamlets(); ++j) data.patterns[j] = model.intensity(probe, object, j);
}

// Exact problem: data generated by the windowed model from a known probe and object.
struct ExactProblem {
  PtychoDataset data;
  ReconGeometry geometry;
  CArray probe;
  ObjectStack truth;
};

inline ExactProblem exact_problem(std::size_t n_slices, double delta, std::vector<double> spacings) {
  const OpticalConfig c = small_config(delta, spacings);
  const DoeSpec doe = small_doe();
  const ObjectStack full = unity_stack(n_slices, 256, 256, c.object_pitch(), spacings);
  ExactProblem p;
  p.data = simulate_dataset(doe, full, c);
  p.geometry = make_recon_geometry(p.data);
  p.probe = ideal_probe(doe, c, p.data.segment_size);
  const double period = c.wavelength * c.f2 / c.detector_pitch;
  p.truth = smooth_stack(n_slices, p.geometry.object_rows, p.geometry.pitch, spacings, period);
  make_consistent(p.data, MultiSliceModel(p.geometry), p.probe, p.truth);
  return p;
}

}  // namespace fixtures
