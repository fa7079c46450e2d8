#pragma once

#include <stdexcept>
#include <string>

#include "ssp3d/pipeline.hpp"

namespace ssp3d {

/// Invalid run configuration. what() reads "source:line:col: field: problem"
/// when the location is known.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// YAML run configuration. Lengths carry their unit in the key name:
///
///   seed: 7
///   output_dir: out
///   optical:    {wavelength_nm, f1_mm, f2_mm, detector_rows, detector_cols,
///                detector_pitch_um, delta_mm, slice_spacings_mm: [..]}
///   doe:        {n_pinholes, pinhole_radius_um, pattern_extent_mm}
///   simulation: {segment_size, lloyd_iterations, photon_count,
///                reference_patterns, edges: unmeasured|reject}
///   recon:      {iterations, error_threshold, alpha, beta,
///                probe_update_start, order: sequential|shuffled, seed,
///                starts, trial_iterations}
///   phantom:    {kind, feature_width_um, size_mm, transmission, phase_rad,
///                count, seed}
///   dataset: path/to/file.3dssp
///
/// Every section and key is optional; omitted values keep their defaults.
/// Unknown keys are errors. The result is validated unless `validate` is
/// false (the analyze subcommand needs no phantom or dataset).
RunConfig parse_config(const std::string& text, const std::string& source = "<config>", bool validate = true);
RunConfig load_config(const std::string& path, bool validate = true);

/// YAML in the same schema; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const RunConfig& config);

}  // namespace ssp3d
