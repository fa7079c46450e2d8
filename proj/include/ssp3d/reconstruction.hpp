#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssp3d/errors.hpp"
#include "ssp3d/field.hpp"
#include "ssp3d/object_stack.hpp"
#include "ssp3d/propagation.hpp"
#include "ssp3d/simulator.hpp"

namespace ssp3d {

enum class BeamletOrder { sequential, shuffled };

struct ReconConfig {
  int max_iterations = 300;
  double error_threshold = 1e-6;  // stop when |DEC change| drops below this
  double alpha = 1.0;             // object step
  double beta = 1.0;              // probe step
  int probe_update_start = 3;     // first (1-based) iteration that updates the probe
  BeamletOrder order = BeamletOrder::sequential;
  std::uint64_t seed = 0;         // for shuffled order
  int starts = 1;                 // reconstruct_best_of: number of trial runs
  int trial_iterations = 0;       // reconstruct_best_of: length of each trial

  void validate() const;
};

struct ErrorRecord {
  int iteration = 0;
  double dec = 0.0;
  std::optional<double> oec;
};

struct ReconstructionState {
  ComplexField probe;  // incident wave at the first slice, window grid
  ObjectStack object;  // full reconstruction grid
  int iteration = 0;
  std::vector<ErrorRecord> history;
};

/// Window placement of the per-beamlet model on the reconstruction grid.
///
/// Every beamlet uses an M x M window at pitch lambda f2 / (M dX). On slice s
/// the window of beamlet j starts at origins[j][s]; the part of the beamlet
/// position that is not a whole pixel is kept in residuals[j][s] and applied
/// as a linear phase by the inter-slice propagator.
struct ReconGeometry {
  int window = 0;
  double pitch = 0.0;
  double wavelength = 0.0;
  Eigen::Index object_rows = 0;
  Eigen::Index object_cols = 0;
  std::vector<double> spacings;
  std::vector<std::vector<Pixel>> origins;    // [beamlet][slice]
  std::vector<std::vector<Vec2>> residuals;   // [beamlet][slice], meters

  std::size_t n_beamlets() const { return origins.size(); }
  std::size_t n_slices() const { return spacings.size() + 1; }
  /// Sub-pixel placement of the probe on the first slice.
  ShiftSpec probe_shift(std::size_t j) const;
  /// Propagation from slice s to s + 1 for beamlet j.
  ShiftSpec transition(std::size_t j, std::size_t s) const;
};

/// Pitch of the per-beamlet window grid.
double window_pitch(const OpticalConfig& config, int segment_size);

/// Window placement for a dataset. `margin` extra pixels are added around the
/// smallest grid that contains every window.
ReconGeometry make_recon_geometry(const PtychoDataset& dataset, int margin = 0);

/// Forward multi-slice model of one beamlet on its windows.
struct BeamletSweep {
  std::vector<CArray> windows;   // object windows, per slice
  std::vector<CArray> incident;  // psi_i per slice
  std::vector<CArray> exit;      // psi_e per slice
};

/// Shifted multi-slice forward and inverse model bound to one geometry.
/// Not thread-safe; use one instance per thread.
class MultiSliceModel {
 public:
  explicit MultiSliceModel(ReconGeometry geometry);

  const ReconGeometry& geometry() const { return geometry_; }
  const InterSlicePropagator& propagator() const { return propagator_; }

  BeamletSweep forward(const CArray& probe, const ObjectStack& object, std::size_t j) const;
  /// |F{exit wave}|^2 of beamlet j, centered.
  RArray intensity(const CArray& probe, const ObjectStack& object, std::size_t j) const;

  CArray window(const CArray& slice, std::size_t j, std::size_t s) const;
  void write_window(CArray& slice, const CArray& values, std::size_t j, std::size_t s) const;

 private:
  ReconGeometry geometry_;
  InterSlicePropagator propagator_;
};

/// Mean of the centered inverse transforms of sqrt(segment intensity), scaled
/// so the probe energy equals the mean segment energy. Warns and returns a
/// zero probe when every segment is empty. Throws on an empty list.
CArray init_probe(const std::vector<RArray>& segment_intensities);

/// Exact incident wave of one beamlet on the first slice in window
/// coordinates: the pinhole image cropped to `window` pixels, brought back to
/// the window grid and defocused by delta. Sub-pixel placement is excluded.
CArray ideal_probe(const DoeSpec& doe, const OpticalConfig& config, int window);

/// Free-space object on the reconstruction grid.
ObjectStack init_object(std::size_t n_slices, const ReconGeometry& geometry);

/// Replace the Fourier magnitudes of exit_wave by sqrt(measured) and keep the
/// phases. Where |F| < 1e-12 max|F| the phase is taken as 1. Pixels outside
/// `measured_mask` (when given) keep the model value.
CArray modulus_constraint(const CArray& exit_wave, const RArray& measured,
                          const MaskArray* measured_mask = nullptr);

struct PieUpdate {
  CArray object;
  CArray incident;
  bool object_updated = true;
};

/// ePIE/3PIE step for one slice.
PieUpdate pie_update(const CArray& object_window, const CArray& incident, const CArray& exit_old,
                     const CArray& exit_new, double alpha, double beta, bool update_incident);

/// One beamlet: forward sweep, modulus constraint at the last slice, then a
/// backward sweep of PIE updates and inverse propagations. Updated windows are
/// written back into the object; the probe is updated when requested.
void beamlet_pass(ReconstructionState& state, const PtychoDataset& dataset, const MultiSliceModel& model,
                  std::size_t j, const ReconConfig& config, bool update_probe);

/// Convenience overload that builds the geometry from the dataset.
ReconstructionState beamlet_pass(ReconstructionState state, const PtychoDataset& dataset, std::size_t j,
                                 const ReconConfig& config);

/// Initial state: probe from the reference patterns when present, otherwise
/// from the measured patterns; free-space object.
ReconstructionState initial_state(const PtychoDataset& dataset, const MultiSliceModel& model);

/// Full reconstruction. `truth`, when given, must sit on the reconstruction
/// grid and adds an OEC column to the error history.
ReconstructionState reconstruct(const PtychoDataset& dataset, std::size_t n_slices, const ReconConfig& config,
                                const ObjectStack* truth = nullptr);

/// Continue iterating from `state` (its object must sit on the model's grid).
ReconstructionState reconstruct(const PtychoDataset& dataset, const MultiSliceModel& model,
                                ReconstructionState state, const ReconConfig& config,
                                const ObjectStack* truth = nullptr);

/// Multi-start reconstruction. With config.starts > 1, runs that many trials of
/// config.trial_iterations from `state` with shuffle seeds seed, seed + 1, ...,
/// keeps the trial with the highest DEC and continues it (same seed) to
/// max_iterations in total. The choice never looks at `truth`. With starts == 1
/// this is reconstruct().
ReconstructionState reconstruct_best_of(const PtychoDataset& dataset, const MultiSliceModel& model,
                                        const ReconstructionState& state, const ReconConfig& config,
                                        const ObjectStack* truth = nullptr);

/// Diffraction error complement of the current state against the data.
double dec(const ReconstructionState& state, const PtychoDataset& dataset);
double dec(const ReconstructionState& state, const PtychoDataset& dataset, const MultiSliceModel& model);

/// Per-slice illumination coverage sum_j |incident_j|^2 placed at each window.
std::vector<RArray> illumination_coverage(const CArray& probe, const MultiSliceModel& model);

/// Pixels where the coverage exceeds `fraction` of its peak, per slice. OEC
/// is scored on this region.
std::vector<MaskArray> illuminated_region(const CArray& probe, const MultiSliceModel& model,
                                          double fraction = 0.1);

}  // namespace ssp3d
