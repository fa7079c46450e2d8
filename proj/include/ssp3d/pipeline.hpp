#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssp3d/design.hpp"
#include "ssp3d/doe.hpp"
#include "ssp3d/phantom.hpp"
#include "ssp3d/reconstruction.hpp"
#include "ssp3d/simulator.hpp"

namespace ssp3d {

/// Everything one run needs. Either `phantom` (simulate) or `dataset_path`
/// (reconstruct an existing container) is used.
struct RunConfig {
  OpticalConfig optical;
  DoeSpec doe;
  ReconConfig recon;
  SimulationOptions simulation;
  std::optional<PhantomSpec> phantom;
  std::string dataset_path;
  std::string output_dir = "ssp3d_out";
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Phantom slice spacings follow the optical config.
PhantomSpec phantom_for(const RunConfig& config);

/// Simulate the configured phantom on the full-field grid.
PtychoDataset simulate(const RunConfig& config);

/// The configured phantom rasterized on a reconstruction grid.
ObjectStack truth_on_grid(const PhantomSpec& phantom, const ReconGeometry& geometry);

struct SweepRow {
  double separation = 0.0;
  double oec = 0.0;             // all slices, illuminated region
  double dec = 0.0;
  double dec_normalized = 0.0;  // across the sweep, max -> 1, min -> 0
  double product_oec = 0.0;     // product of slices vs product of truth
  std::vector<double> slice_oec;
  int iterations = 0;
};

struct SweepResult {
  double axial_resolution = 0.0;  // from the DOE extent and the window size
  std::vector<SweepRow> rows;
};

/// Design-analysis view of the bench. The DOE image on the detector is the
/// extent, the segment size (or its automatic value) the window.
SystemGeometry system_geometry(const RunConfig& config);

/// Axial resolution of the configured bench: DOE image extent on the detector
/// against the segment size.
double bench_axial_resolution(const RunConfig& config);

/// For every separation: simulate the two-slice phantom, reconstruct, score.
/// Separations run in parallel on up to `threads` workers (0 = hardware).
/// Requires at least two separations and a phantom.
SweepResult separation_sweep(const RunConfig& base, const std::vector<double>& separations,
                             unsigned threads = 0);

}  // namespace ssp3d
