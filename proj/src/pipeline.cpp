#include "ssp3d/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

#include "ssp3d/design.hpp"
#include "ssp3d/metrics.hpp"

namespace ssp3d {

void RunConfig::validate() const {
  optical.validate();
  doe.validate();
  recon.validate();
  if (simulation.segment_size < 0) throw std::invalid_argument("simulation.segment_size must be >= 0");
  if (simulation.photon_count < 0.0) throw std::invalid_argument("simulation.photon_count must be >= 0");
  if (!phantom && dataset_path.empty()) throw std::invalid_argument("config needs a phantom or a dataset path");
  if (phantom) {
    const std::size_t n = phantom_for(*this).n_slices();
    if (n != optical.n_slices())
      throw std::invalid_argument("phantom " + to_string(phantom->kind) + " has " + std::to_string(n) +
                                  " slice(s) but the optics define " + std::to_string(optical.n_slices()));
  }
}

PhantomSpec phantom_for(const RunConfig& config) {
  if (!config.phantom) throw std::invalid_argument("config has no phantom");
  PhantomSpec spec = *config.phantom;
  spec.spacings = config.optical.slice_spacings;
  return spec;
}

PtychoDataset simulate(const RunConfig& config) {
  config.validate();
  const PhantomSpec spec = phantom_for(config);
  const OpticalConfig& o = config.optical;
  const ObjectStack object = make_phantom(spec, o.detector_rows, o.detector_cols, o.object_pitch());
  SimulationOptions options = config.simulation;
  options.seed = config.seed;
  return simulate_dataset(config.doe, object, o, options);
}

ObjectStack truth_on_grid(const PhantomSpec& phantom, const ReconGeometry& geometry) {
  PhantomSpec spec = phantom;
  spec.spacings = geometry.spacings;
  return make_phantom(spec, geometry.object_rows, geometry.object_cols, geometry.pitch);
}

namespace {

SweepRow sweep_point(const RunConfig& base, double separation) {
  RunConfig config = base;
  config.optical.slice_spacings = {separation};
  const PtychoDataset data = simulate(config);
  const MultiSliceModel model(make_recon_geometry(data));
  const ObjectStack truth = truth_on_grid(phantom_for(config), model.geometry());
  const ReconstructionState state = reconstruct_best_of(data, model, initial_state(data, model), config.recon, &truth);

  const auto roi = illuminated_region(state.probe.data, model);
  SweepRow row;
  row.separation = separation;
  row.oec = oec(state.object, truth, roi);
  row.dec = state.history.empty() ? dec(state, data, model) : state.history.back().dec;
  row.product_oec = product_oec(state.object, truth, &roi.front());
  for (std::size_t s = 0; s < truth.n_slices(); ++s) row.slice_oec.push_back(slice_oec(state.object, truth, s, &roi[s]));
  row.iterations = state.iteration;
  return row;
}

}  // namespace

SystemGeometry system_geometry(const RunConfig& config) {
  const OpticalConfig& o = config.optical;
  int window = config.simulation.segment_size;
  if (window == 0) window = max_segment_size(beamlet_detector_pixels(config.doe, o), o.detector_rows, o.detector_cols);
  SystemGeometry g;
  g.wavelength = o.wavelength;
  g.focal_length = o.f2;
  g.x_det = config.doe.pattern_extent * o.f2 / o.f1;
  g.x_dif = window * o.detector_pitch;
  g.pinhole_radius = config.doe.pinhole_radius;
  g.n_pinholes = config.doe.n_pinholes;
  return g;
}

double bench_axial_resolution(const RunConfig& config) {
  const SystemGeometry g = system_geometry(config);
  return axial_resolution(g.wavelength, g.focal_length, g.x_det, g.x_dif);
}

SweepResult separation_sweep(const RunConfig& base, const std::vector<double>& separations, unsigned threads) {
  if (separations.size() < 2) throw std::invalid_argument("separation_sweep: need at least two separations");
  if (!base.phantom) throw std::invalid_argument("separation_sweep: config has no phantom");
  if (base.phantom->kind == PhantomKind::broken_loop)
    throw std::invalid_argument("separation_sweep: needs a two-slice phantom");
  for (double s : separations)
    if (!(s >= 0.0)) throw std::invalid_argument("separation_sweep: separations must be >= 0");

  RunConfig probe_config = base;
  probe_config.optical.slice_spacings = {separations.front()};
  probe_config.validate();

  SweepResult result;
  result.rows.resize(separations.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(separations.size()));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned w) {
    try {
      for (std::size_t i = next++; i < separations.size(); i = next++) result.rows[i] = sweep_point(base, separations[i]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> decs;
  for (const SweepRow& r : result.rows) decs.push_back(r.dec);
  const auto normalized = normalize_unit_range(decs);
  for (std::size_t i = 0; i < decs.size(); ++i) result.rows[i].dec_normalized = normalized[i];

  result.axial_resolution = bench_axial_resolution(base);
  return result;
}

}  // namespace ssp3d
