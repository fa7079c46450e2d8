#include "ssp3d/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "ssp3d/fft.hpp"
#include "ssp3d/log.hpp"
#include "ssp3d/metrics.hpp"

namespace ssp3d {

void ReconConfig::validate() const {
  if (max_iterations < 0) throw std::invalid_argument("ReconConfig: max_iterations must be >= 0");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("ReconConfig: alpha must lie in (0, 2]");
  if (!(beta > 0.0 && beta <= 2.0)) throw std::invalid_argument("ReconConfig: beta must lie in (0, 2]");
  if (!(error_threshold >= 0.0)) throw std::invalid_argument("ReconConfig: error_threshold must be >= 0");
  if (starts < 1) throw std::invalid_argument("ReconConfig: starts must be >= 1");
  if (starts > 1 && (trial_iterations < 1 || trial_iterations > max_iterations))
    throw std::invalid_argument("ReconConfig: trial_iterations must lie in [1, max_iterations] when starts > 1");
}

ShiftSpec ReconGeometry::probe_shift(std::size_t j) const {
  const Vec2& r = residuals.at(j).front();
  return {0.0, r.x(), r.y()};
}

ShiftSpec ReconGeometry::transition(std::size_t j, std::size_t s) const {
  const Vec2 d = residuals.at(j).at(s + 1) - residuals.at(j).at(s);
  return {spacings.at(s), d.x(), d.y()};
}

double window_pitch(const OpticalConfig& config, int segment_size) {
  return config.wavelength * config.f2 / (segment_size * config.detector_pitch);
}

ReconGeometry make_recon_geometry(const PtychoDataset& dataset, int margin) {
  const auto& positions = dataset.geometry.slice_positions;
  if (positions.size() != dataset.n_beamlets())
    throw std::invalid_argument("make_recon_geometry: slice positions missing for some beamlets");
  if (dataset.segment_size < 2 || dataset.segment_size % 2 != 0)
    throw std::invalid_argument("make_recon_geometry: segment size must be even and >= 2");
  ReconGeometry g;
  g.window = dataset.segment_size;
  g.pitch = window_pitch(dataset.config, dataset.segment_size);
  g.wavelength = dataset.config.wavelength;
  g.spacings = dataset.config.slice_spacings;

  long reach = 0;
  std::vector<std::vector<Eigen::Vector2d>> whole(positions.size());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (positions[j].size() != g.n_slices())
      throw std::invalid_argument("make_recon_geometry: beamlet " + std::to_string(j) + " has the wrong slice count");
    for (const Vec2& p : positions[j]) {
      const Eigen::Vector2d rounded = (p / g.pitch).array().round();
      reach = std::max({reach, std::lround(std::abs(rounded.x())), std::lround(std::abs(rounded.y()))});
      whole[j].push_back(rounded);
    }
  }
  long size = g.window + 2 * reach + 2 * std::max(margin, 0);
  size += size % 2;
  g.object_rows = g.object_cols = size;
  const long center = center_index(size);
  const long half = g.window / 2;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    std::vector<Pixel> origins;
    std::vector<Vec2> residuals;
    for (std::size_t s = 0; s < positions[j].size(); ++s) {
      const Eigen::Vector2d& w = whole[j][s];
      origins.push_back({center + std::lround(w.y()) - half, center + std::lround(w.x()) - half});
      residuals.push_back(positions[j][s] - w * g.pitch);
    }
    g.origins.push_back(std::move(origins));
    g.residuals.push_back(std::move(residuals));
  }
  return g;
}

namespace {

bool is_zero(const ShiftSpec& s) { return s.dz == 0.0 && s.dx == 0.0 && s.dy == 0.0; }

}  // namespace

MultiSliceModel::MultiSliceModel(ReconGeometry geometry)
    : geometry_(std::move(geometry)),
      propagator_(geometry_.window, geometry_.window, geometry_.pitch, geometry_.wavelength) {}

CArray MultiSliceModel::window(const CArray& slice, std::size_t j, std::size_t s) const {
  const Pixel o = geometry_.origins.at(j).at(s);
  const long m = geometry_.window;
  if (o.row < 0 || o.col < 0 || o.row + m > slice.rows() || o.col + m > slice.cols())
    throw std::out_of_range("window for beamlet " + std::to_string(j) + " on slice " + std::to_string(s) +
                            " lies outside the object grid");
  return slice.block(o.row, o.col, m, m);
}

void MultiSliceModel::write_window(CArray& slice, const CArray& values, std::size_t j, std::size_t s) const {
  const Pixel o = geometry_.origins.at(j).at(s);
  const long m = geometry_.window;
  if (o.row < 0 || o.col < 0 || o.row + m > slice.rows() || o.col + m > slice.cols())
    throw std::out_of_range("window for beamlet " + std::to_string(j) + " on slice " + std::to_string(s) +
                            " lies outside the object grid");
  slice.block(o.row, o.col, m, m) = values;
}

BeamletSweep MultiSliceModel::forward(const CArray& probe, const ObjectStack& object, std::size_t j) const {
  const std::size_t n = geometry_.n_slices();
  if (object.n_slices() != n) throw std::invalid_argument("MultiSliceModel: object slice count mismatch");
  BeamletSweep sweep;
  sweep.windows.reserve(n);
  sweep.incident.reserve(n);
  sweep.exit.reserve(n);
  const ShiftSpec placement = geometry_.probe_shift(j);
  sweep.incident.push_back(is_zero(placement) ? probe : propagator_.forward(probe, placement));
  for (std::size_t s = 0; s < n; ++s) {
    sweep.windows.push_back(window(object.slices[s], j, s));
    sweep.exit.push_back(sweep.incident[s] * sweep.windows[s]);
    if (s + 1 < n) {
      const ShiftSpec step = geometry_.transition(j, s);
      sweep.incident.push_back(is_zero(step) ? sweep.exit[s] : propagator_.forward(sweep.exit[s], step));
    }
  }
  return sweep;
}

RArray MultiSliceModel::intensity(const CArray& probe, const ObjectStack& object, std::size_t j) const {
  return fft2c(forward(probe, object, j).exit.back()).abs2();
}

CArray init_probe(const std::vector<RArray>& segment_intensities) {
  if (segment_intensities.empty()) throw std::invalid_argument("init_probe: no segments");
  const auto rows = segment_intensities.front().rows(), cols = segment_intensities.front().cols();
  CArray sum = CArray::Zero(rows, cols);
  double energy = 0.0;
  for (const RArray& seg : segment_intensities) {
    if (seg.rows() != rows || seg.cols() != cols) throw std::invalid_argument("init_probe: segment shapes differ");
    sum += ifft2c(seg.max(0.0).sqrt().cast<Complex>());
    energy += seg.max(0.0).sum();
  }
  energy /= static_cast<double>(segment_intensities.size());
  const double current = sum.abs2().sum();
  if (current == 0.0) {
    warn("init_probe: all segments are empty; probe is zero");
    return sum;
  }
  return sum * std::sqrt(energy / current);
}

CArray ideal_probe(const DoeSpec& doe, const OpticalConfig& config, int window) {
  if (window < 2) throw std::invalid_argument("ideal_probe: window must hold at least 2 pixels");
  // The 4f relay images the pinhole onto the detector; every snapped pinhole
  // has the same pixel footprint, so one centered disk serves all beamlets.
  const DoeSpec single{1, doe.pinhole_radius, 2.0 * doe.pinhole_radius * (1.0 + 1e-9), doe.layout};
  const ComplexField disk = render_doe(single, window, window, config.doe_pitch(), config.wavelength);
  const ComplexField probe(ifft2c(disk.data), window_pitch(config, window), config.wavelength);
  return config.delta == 0.0 ? probe.data : isp(probe, ShiftSpec{config.delta, 0.0, 0.0}).data;
}

ObjectStack init_object(std::size_t n_slices, const ReconGeometry& geometry) {
  if (n_slices != geometry.n_slices())
    throw std::invalid_argument("init_object: slice count does not match the geometry");
  return unity_stack(n_slices, geometry.object_rows, geometry.object_cols, geometry.pitch, geometry.spacings);
}

CArray modulus_constraint(const CArray& exit_wave, const RArray& measured, const MaskArray* measured_mask) {
  if (exit_wave.rows() != measured.rows() || exit_wave.cols() != measured.cols())
    throw std::invalid_argument("modulus_constraint: shape mismatch");
  if (measured_mask && (measured_mask->rows() != measured.rows() || measured_mask->cols() != measured.cols()))
    throw std::invalid_argument("modulus_constraint: mask shape mismatch");
  CArray spectrum = fft2c(exit_wave);
  const RArray magnitude = spectrum.abs();
  const double floor = 1e-12 * magnitude.maxCoeff();
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (measured_mask && !(*measured_mask)(i)) continue;
    const double target = std::sqrt(std::max(measured(i), 0.0));
    spectrum(i) = magnitude(i) > floor ? spectrum(i) * (target / magnitude(i)) : Complex(target, 0.0);
  }
  return ifft2c(spectrum);
}

PieUpdate pie_update(const CArray& object_window, const CArray& incident, const CArray& exit_old,
                     const CArray& exit_new, double alpha, double beta, bool update_incident) {
  if (object_window.rows() != incident.rows() || object_window.cols() != incident.cols() ||
      exit_old.rows() != incident.rows() || exit_old.cols() != incident.cols() ||
      exit_new.rows() != incident.rows() || exit_new.cols() != incident.cols())
    throw std::invalid_argument("pie_update: shape mismatch");
  const CArray diff = exit_new - exit_old;
  PieUpdate out{object_window, incident, true};
  const double incident_max = incident.abs2().maxCoeff();
  if (incident_max > 0.0) {
    out.object = object_window + (alpha / incident_max) * incident.conjugate() * diff;
  } else {
    out.object_updated = false;
    warn("pie_update: window is not illuminated; object update skipped");
  }
  if (update_incident) {
    const double object_max = object_window.abs2().maxCoeff();
    if (object_max > 0.0) out.incident = incident + (beta / object_max) * object_window.conjugate() * diff;
  }
  return out;
}

void beamlet_pass(ReconstructionState& state, const PtychoDataset& dataset, const MultiSliceModel& model,
                  std::size_t j, const ReconConfig& config, bool update_probe) {
  if (j >= dataset.n_beamlets()) throw std::out_of_range("beamlet_pass: beamlet index out of range");
  const ReconGeometry& g = model.geometry();
  const auto& propagator = model.propagator();
  BeamletSweep sweep = model.forward(state.probe.data, state.object, j);
  const MaskArray* mask = dataset.masks.empty() ? nullptr : &dataset.masks[j];
  CArray target = modulus_constraint(sweep.exit.back(), dataset.patterns[j], mask);
  for (std::size_t s = g.n_slices(); s-- > 0;) {
    const bool update_incident = s > 0 || update_probe;
    PieUpdate u = pie_update(sweep.windows[s], sweep.incident[s], sweep.exit[s], target, config.alpha,
                             config.beta, update_incident);
    model.write_window(state.object.slices[s], u.object, j, s);
    if (s > 0) {
      const ShiftSpec step = g.transition(j, s - 1);
      target = is_zero(step) ? std::move(u.incident) : propagator.inverse(u.incident, step);
    } else if (update_probe) {
      const ShiftSpec placement = g.probe_shift(j);
      state.probe.data = is_zero(placement) ? std::move(u.incident) : propagator.inverse(u.incident, placement);
    }
  }
}

ReconstructionState beamlet_pass(ReconstructionState state, const PtychoDataset& dataset, std::size_t j,
                                 const ReconConfig& config) {
  const MultiSliceModel model(make_recon_geometry(dataset));
  beamlet_pass(state, dataset, model, j, config, state.iteration + 1 >= config.probe_update_start);
  return state;
}

ReconstructionState initial_state(const PtychoDataset& dataset, const MultiSliceModel& model) {
  const ReconGeometry& g = model.geometry();
  const auto& source = dataset.reference_patterns.empty() ? dataset.patterns : dataset.reference_patterns;
  ReconstructionState state;
  // The DOE-only images fix the probe at the crossover; the first slice sits
  // a known distance delta further on.
  const CArray focus = init_probe(source);
  const double delta = dataset.config.delta;
  state.probe = ComplexField(delta == 0.0 ? focus : model.propagator().forward(focus, {delta, 0.0, 0.0}), g.pitch,
                             g.wavelength);
  state.object = init_object(g.n_slices(), g);
  return state;
}

std::vector<RArray> illumination_coverage(const CArray& probe, const MultiSliceModel& model) {
  const ReconGeometry& g = model.geometry();
  std::vector<RArray> out(g.n_slices(), RArray::Zero(g.object_rows, g.object_cols));
  const RArray spot = probe.abs2();
  for (std::size_t j = 0; j < g.n_beamlets(); ++j)
    for (std::size_t s = 0; s < g.n_slices(); ++s) {
      const Pixel o = g.origins[j][s];
      out[s].block(o.row, o.col, g.window, g.window) += spot;
    }
  return out;
}

double dec(const ReconstructionState& state, const PtychoDataset& dataset, const MultiSliceModel& model) {
  std::vector<RArray> predicted;
  predicted.reserve(dataset.n_beamlets());
  for (std::size_t j = 0; j < dataset.n_beamlets(); ++j)
    predicted.push_back(model.intensity(state.probe.data, state.object, j));
  return dec_from_intensities(predicted, dataset.patterns, dataset.masks);
}

double dec(const ReconstructionState& state, const PtychoDataset& dataset) {
  return dec(state, dataset, MultiSliceModel(make_recon_geometry(dataset)));
}

ReconstructionState reconstruct(const PtychoDataset& dataset, std::size_t n_slices, const ReconConfig& config,
                                const ObjectStack* truth) {
  config.validate();
  dataset.validate();
  const MultiSliceModel model(make_recon_geometry(dataset));
  if (n_slices != model.geometry().n_slices())
    throw std::invalid_argument("reconstruct: requested " + std::to_string(n_slices) +
                                " slices but the dataset geometry has " + std::to_string(model.geometry().n_slices()));
  return reconstruct(dataset, model, initial_state(dataset, model), config, truth);
}

ReconstructionState reconstruct(const PtychoDataset& dataset, const MultiSliceModel& model,
                                ReconstructionState state, const ReconConfig& config, const ObjectStack* truth) {
  config.validate();
  const ReconGeometry& g = model.geometry();
  if (state.object.n_slices() != g.n_slices() || state.object.rows() != g.object_rows ||
      state.object.cols() != g.object_cols)
    throw std::invalid_argument("reconstruct: state object is not on the reconstruction grid");
  if (state.probe.rows() != g.window || state.probe.cols() != g.window)
    throw std::invalid_argument("reconstruct: probe does not match the window size");

  std::vector<MaskArray> roi;
  if (truth) {
    if (truth->n_slices() != g.n_slices() || truth->rows() != g.object_rows || truth->cols() != g.object_cols)
      throw std::invalid_argument("reconstruct: truth object is not on the reconstruction grid");
    roi = illuminated_region(state.probe.data, model);
  }

  std::vector<std::size_t> order(dataset.n_beamlets());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  const int first = state.iteration + 1;
  for (int it = first; it < first + config.max_iterations; ++it) {
    if (config.order == BeamletOrder::shuffled) std::shuffle(order.begin(), order.end(), rng);
    const bool update_probe = it >= config.probe_update_start;
    for (std::size_t j : order) beamlet_pass(state, dataset, model, j, config, update_probe);
    state.iteration = it;
    if (!state.probe.data.allFinite())
      throw NumericalError("reconstruct: probe became non-finite at iteration " + std::to_string(it));

    ErrorRecord record{it, dec(state, dataset, model), std::nullopt};
    if (truth) record.oec = oec(state.object, *truth, roi);
    const bool plateau =
        !state.history.empty() && std::abs(record.dec - state.history.back().dec) < config.error_threshold;
    state.history.push_back(record);
    if (plateau) break;
  }
  return state;
}

ReconstructionState reconstruct_best_of(const PtychoDataset& dataset, const MultiSliceModel& model,
                                        const ReconstructionState& state, const ReconConfig& config,
                                        const ObjectStack* truth) {
  config.validate();
  if (config.starts == 1) return reconstruct(dataset, model, state, config, truth);

  std::optional<ReconstructionState> best;
  ReconConfig chosen;
  for (int k = 0; k < config.starts; ++k) {
    ReconConfig trial = config;
    trial.seed = config.seed + static_cast<std::uint64_t>(k);
    trial.max_iterations = config.trial_iterations;
    trial.starts = 1;
    ReconstructionState s = reconstruct(dataset, model, state, trial, truth);
    const double d = s.history.empty() ? dec(s, dataset, model) : s.history.back().dec;
    const double best_dec = !best ? 0.0 : best->history.empty() ? dec(*best, dataset, model) : best->history.back().dec;
    if (!best || d > best_dec) {
      best = std::move(s);
      chosen = trial;
    }
  }
  chosen.max_iterations = config.max_iterations - (best->iteration - state.iteration);
  if (chosen.max_iterations <= 0) return std::move(*best);
  return reconstruct(dataset, model, std::move(*best), chosen, truth);
}

std::vector<MaskArray> illuminated_region(const CArray& probe, const MultiSliceModel& model, double fraction) {
  std::vector<MaskArray> out;
  for (const RArray& c : illumination_coverage(probe, model)) out.push_back(c > fraction * c.maxCoeff());
  return out;
}

}  // namespace ssp3d
