#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "ssp3d/config.hpp"
#include "ssp3d/container.hpp"
#include "ssp3d/errors.hpp"
#include "ssp3d/image_io.hpp"
#include "ssp3d/metrics.hpp"
#include "ssp3d/segmentation.hpp"

namespace ssp3d::cli {

namespace fs = std::filesystem;

namespace {

// Flags shared by the subcommands that take a run config. Unset optionals
// leave the config file's value alone.
struct Overrides {
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> segment_size;
  std::optional<double> photons;
  std::optional<int> lloyd;
  std::optional<int> iterations;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> probe_start;
  std::optional<double> threshold;
  std::optional<int> starts;
  std::optional<int> trial_iterations;
  std::string order;
};

void add_config_flags(CLI::App* cmd, Overrides& o, bool recon_flags) {
  cmd->add_option("-c,--config", o.config_path, "YAML run config")->check(CLI::ExistingFile);
  cmd->add_option("-o,--output-dir", o.output_dir, "output directory (overrides $" + std::string(kOutputDirEnv) + ")");
  cmd->add_option("--seed", o.seed, "seed for stochastic options");
  cmd->add_option("--segment-size", o.segment_size, "crop side in pixels (0 = largest disjoint)");
  cmd->add_option("--photons", o.photons, "mean photons per beamlet (0 = ideal)");
  cmd->add_option("--lloyd", o.lloyd, "Lloyd iterations of the segmentation");
  if (!recon_flags) return;
  cmd->add_option("--iterations", o.iterations, "reconstruction iterations");
  cmd->add_option("--alpha", o.alpha, "object step size");
  cmd->add_option("--beta", o.beta, "probe step size");
  cmd->add_option("--probe-start", o.probe_start, "first iteration that updates the probe");
  cmd->add_option("--threshold", o.threshold, "stop when the DEC change drops below this");
  cmd->add_option("--starts", o.starts, "trial runs; the best DEC continues");
  cmd->add_option("--trial-iterations", o.trial_iterations, "iterations of each trial run");
  cmd->add_option("--order", o.order, "beamlet order")->check(CLI::IsMember({"sequential", "shuffled"}));
}

RunConfig resolve(const Overrides& o, bool validate) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path, false);
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.output_dir = env;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (o.seed) c.seed = *o.seed;
  if (o.segment_size) c.simulation.segment_size = *o.segment_size;
  if (o.photons) c.simulation.photon_count = *o.photons;
  if (o.lloyd) c.simulation.lloyd_iterations = *o.lloyd;
  if (o.iterations) c.recon.max_iterations = *o.iterations;
  if (o.alpha) c.recon.alpha = *o.alpha;
  if (o.beta) c.recon.beta = *o.beta;
  if (o.probe_start) c.recon.probe_update_start = *o.probe_start;
  if (o.threshold) c.recon.error_threshold = *o.threshold;
  if (o.starts) c.recon.starts = *o.starts;
  if (o.trial_iterations) c.recon.trial_iterations = *o.trial_iterations;
  if (!o.order.empty()) c.recon.order = o.order == "shuffled" ? BeamletOrder::shuffled : BeamletOrder::sequential;
  if (validate) {
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError((o.config_path.empty() ? std::string("<flags>") : o.config_path) + ": " + e.what());
    }
  }
  return c;
}

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory '" + dir.string() + "'");
  const fs::path probe = dir / ".ssp3d_write_test";
  if (!std::ofstream(probe)) throw DataError("output directory '" + dir.string() + "' is not writable");
  fs::remove(probe, ec);
  return dir;
}

std::string numbered(const std::string& stem, std::size_t i, const std::string& ext) {
  std::ostringstream name;
  name << stem << std::setw(2) << std::setfill('0') << i << ext;
  return name.str();
}

void write_slices(const fs::path& dir, const std::string& stem, const ObjectStack& object) {
  for (std::size_t s = 0; s < object.n_slices(); ++s) {
    write_pgm((dir / numbered(stem, s, "_amplitude.pgm")).string(), object.slices[s].abs(), 0.0,
              std::max(1.0, object.slices[s].abs().maxCoeff()));
    write_phase_ppm((dir / numbered(stem, s, "_phase.ppm")).string(), object.slices[s]);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!(out << text)) throw DataError("write to '" + path.string() + "' failed");
}

ObjectStack read_truth(const std::string& path, const ReconGeometry& g) {
  ObjectStack truth = read_object(path);
  if (truth.n_slices() != g.spacings.size() + 1 || truth.rows() != g.object_rows || truth.cols() != g.object_cols)
    throw DataError(path + ": truth is " + std::to_string(truth.n_slices()) + " x " + std::to_string(truth.rows()) +
                    " x " + std::to_string(truth.cols()) + ", the reconstruction grid is " +
                    std::to_string(g.spacings.size() + 1) + " x " + std::to_string(g.object_rows) + " x " +
                    std::to_string(g.object_cols));
  return truth;
}

int cmd_simulate(const Overrides& o, std::ostream& out) {
  const RunConfig config = resolve(o, true);
  if (!config.phantom) throw ConfigError("simulate: the config has no phantom section");
  const fs::path dir = prepare_dir(config.output_dir);
  const PtychoDataset data = simulate(config);

  write_dataset((dir / "dataset.3dssp").string(), data);
  write_text(dir / "config.yaml", dump_config(config));
  const MultiSliceModel model(make_recon_geometry(data));
  const ObjectStack truth = truth_on_grid(phantom_for(config), model.geometry());
  write_object((dir / "truth.3dsso").string(), truth);
  write_slices(dir, "truth_slice", truth);
  fs::create_directories(dir / "segments");
  for (std::size_t j = 0; j < data.patterns.size(); ++j)
    write_log_pgm((dir / "segments" / numbered("segment_", j, ".pgm")).string(), data.patterns[j]);

  out << "beamlets      " << data.patterns.size() << "\n"
      << "slices        " << config.optical.n_slices() << "\n"
      << "segment size  " << data.segment_size << " px\n"
      << "dataset       " << (dir / "dataset.3dssp").string() << "\n"
      << "truth         " << (dir / "truth.3dsso").string() << "\n";
  return ok;
}

int cmd_reconstruct(const Overrides& o, const std::string& dataset_path, const std::string& truth_path,
                    std::ostream& out) {
  RunConfig config = resolve(o, false);
  config.recon.validate();
  const fs::path dir = prepare_dir(config.output_dir);
  const PtychoDataset data = read_dataset(dataset_path);
  const MultiSliceModel model(make_recon_geometry(data));
  std::optional<ObjectStack> truth;
  if (!truth_path.empty()) truth = read_truth(truth_path, model.geometry());

  ReconstructionState initial = initial_state(data, model);
  const auto roi = illuminated_region(initial.probe.data, model);
  std::ostringstream csv;
  csv << std::setprecision(10) << "iteration,dec" << (truth ? ",oec" : "") << "\n";
  csv << 0 << ',' << dec(initial, data, model);
  if (truth) csv << ',' << oec(initial.object, *truth, roi);
  csv << "\n";

  const ReconstructionState state =
      reconstruct_best_of(data, model, initial, config.recon, truth ? &*truth : nullptr);
  for (const ErrorRecord& r : state.history) {
    csv << r.iteration << ',' << r.dec;
    if (truth) csv << ',' << r.oec.value_or(std::numeric_limits<double>::quiet_NaN());
    csv << "\n";
  }
  write_text(dir / "errors.csv", csv.str());
  write_object((dir / "object.3dsso").string(), state.object);
  write_slices(dir, "slice", state.object);
  write_phase_ppm((dir / "probe.ppm").string(), state.probe.data);

  out << "iterations  " << state.iteration << "\n";
  if (!state.history.empty()) out << "final DEC   " << state.history.back().dec << "\n";
  if (truth && !state.history.empty() && state.history.back().oec)
    out << "final OEC   " << *state.history.back().oec << "\n";
  out << "output      " << dir.string() << "\n";
  return ok;
}

int cmd_sweep(const Overrides& o, const std::vector<double>& separations_mm, unsigned threads, std::ostream& out) {
  RunConfig config = resolve(o, false);
  std::vector<double> separations;
  for (double s : separations_mm) separations.push_back(s * 1e-3);
  if (separations.size() < 2) throw ConfigError("sweep-separation: need at least two separations");
  config.optical.slice_spacings = {separations.front()};
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir = prepare_dir(config.output_dir);
  const SweepResult result = separation_sweep(config, separations, threads);

  std::ostringstream csv;
  csv << std::setprecision(10) << "separation_um,oec,dec,dec_normalized,product_oec";
  const std::size_t n_slices = result.rows.front().slice_oec.size();
  for (std::size_t s = 0; s < n_slices; ++s) csv << ",oec_slice" << s;
  csv << ",iterations\n";
  std::vector<double> x, y_oec, y_dec;
  for (const SweepRow& r : result.rows) {
    csv << r.separation * 1e6 << ',' << r.oec << ',' << r.dec << ',' << r.dec_normalized << ',' << r.product_oec;
    for (double v : r.slice_oec) csv << ',' << v;
    csv << ',' << r.iterations << "\n";
    x.push_back(r.separation * 1e6);
    y_oec.push_back(r.oec);
    y_dec.push_back(r.dec_normalized);
  }
  write_text(dir / "sweep.csv", csv.str());
  write_text(dir / "config.yaml", dump_config(config));
  const double marker = result.axial_resolution * 1e6;
  write_line_plot((dir / "oec_vs_separation.ppm").string(), x, y_oec, marker);
  write_line_plot((dir / "dec_vs_separation.ppm").string(), x, y_dec, marker);

  out << "axial resolution  " << marker << " um\n" << csv.str();
  return ok;
}

int cmd_analyze(const Overrides& o, bool json, bool strict, std::ostream& out, std::ostream& err) {
  const RunConfig config = resolve(o, false);
  config.optical.validate();
  config.doe.validate();
  const SystemGeometry g = system_geometry(config);
  const DesignReport r = design_report(g, config.optical.detector_pitch);

  if (json) {
    nlohmann::json j = {
        {"axial_resolution_m", r.axial_resolution}, {"transverse_resolution_m", r.transverse_resolution},
        {"axial_extent_m", r.axial_extent},         {"imaging_volume_m3", r.imaging_volume},
        {"oversampling", r.oversampling},           {"beam_radius_m", r.beam_radius},
        {"window_m", g.x_dif},                      {"doe_extent_on_detector_m", g.x_det}};
    for (const OverlapSample& s : r.overlap_table) j["overlap_table"].push_back({{"eta", s.eta}, {"z_m", s.z}});
    out << j.dump(2) << "\n";
  } else {
    out << std::setprecision(6) << "design report\n"
        << "  axial resolution       " << r.axial_resolution * 1e6 << " um\n"
        << "  transverse resolution  " << r.transverse_resolution * 1e6 << " um\n"
        << "  axial extent           " << r.axial_extent * 1e2 << " cm\n"
        << "  imaging volume         " << r.imaging_volume * 1e9 << " mm^3\n"
        << "  oversampling           " << r.oversampling << "\n"
        << "  beam radius            " << r.beam_radius * 1e6 << " um\n"
        << "  overlap                 eta     z (mm)\n";
    for (const OverlapSample& s : r.overlap_table)
      out << "                          " << std::fixed << std::setprecision(2) << s.eta << "  "
          << std::setprecision(3) << s.z * 1e3 << "\n";
    out << std::defaultfloat << std::setprecision(10) << "\n"
        << "axial_resolution_m=" << r.axial_resolution << "\n"
        << "transverse_resolution_m=" << r.transverse_resolution << "\n"
        << "axial_extent_m=" << r.axial_extent << "\n"
        << "imaging_volume_m3=" << r.imaging_volume << "\n"
        << "oversampling=" << r.oversampling << "\n"
        << "beam_radius_m=" << r.beam_radius << "\n";
  }
  if (r.oversampling < 2.0) {
    err << "warning: oversampling " << r.oversampling << " is below 2\n";
    if (strict) return data_error;
  }
  return ok;
}

std::vector<PixelCoord> read_seeds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open seed list '" + path + "'");
  std::vector<PixelCoord> seeds;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    PixelCoord p;
    if (!(fields >> p.row)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw DataError(path + ":" + std::to_string(n) + ": expected 'row col'");
    }
    std::string extra;
    if (!(fields >> p.col) || (fields >> extra)) throw DataError(path + ":" + std::to_string(n) + ": expected 'row col'");
    seeds.push_back(p);
  }
  if (seeds.empty()) throw DataError(path + ": no seeds");
  return seeds;
}

int cmd_segment(const std::string& image_path, const std::string& seeds_path, int lloyd, int segment_size,
                const std::string& edges, const std::string& output_dir, std::ostream& out) {
  std::string dir_name = output_dir;
  if (dir_name.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    dir_name = env && *env ? env : RunConfig{}.output_dir;
  }
  const RArray image = read_pgm(image_path);
  const std::vector<PixelCoord> seeds = read_seeds(seeds_path);
  SegmentMap map;
  try {
    map = centroidal_voronoi(seeds, image.rows(), image.cols(), lloyd);
  } catch (const std::invalid_argument& e) {
    throw DataError(seeds_path + ": " + e.what());
  }
  if (segment_size > 0) map.segment_size = segment_size;
  if (map.segment_size <= 0) throw DataError("segment: no crop size fits the seeds");
  const EdgePolicy policy = edges == "reject" ? EdgePolicy::reject : EdgePolicy::unmeasured;
  const fs::path dir = prepare_dir(dir_name);

  std::vector<RArray> crops;
  try {
    crops = extract_segments(image, map, policy);
  } catch (const std::out_of_range& e) {
    throw DataError(e.what());
  }
  fs::create_directories(dir / "segments");
  for (std::size_t j = 0; j < crops.size(); ++j)
    write_pgm((dir / "segments" / numbered("segment_", j, ".pgm")).string(), crops[j]);
  write_pgm((dir / "labels.pgm").string(), map.labels.cast<double>(), -1.0, static_cast<double>(seeds.size() - 1));

  std::ostringstream csv;
  csv << std::setprecision(10) << "beamlet,center_row,center_col,centroid_row,centroid_col\n";
  for (std::size_t j = 0; j < crops.size(); ++j)
    csv << j << ',' << map.crop_centers[j].row << ',' << map.crop_centers[j].col << ',' << map.centroids[j].row << ','
        << map.centroids[j].col << "\n";
  write_text(dir / "segments.csv", csv.str());
  out << "beamlets      " << crops.size() << "\n"
      << "segment size  " << map.segment_size << " px\n"
      << "digest        " << std::hex << segment_map_digest(map) << std::dec << "\n";
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-shot 3D ptychography: simulate, reconstruct, sweep and analyze", "ssp3d"};
  app.require_subcommand(1);

  Overrides sim_o, rec_o, sweep_o, an_o;
  auto* sim = app.add_subcommand("simulate", "simulate a dataset from a phantom config");
  add_config_flags(sim, sim_o, false);
  sim->get_option("--config")->required();

  std::string dataset_path, truth_path;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct slices from a dataset container");
  rec->add_option("dataset", dataset_path, "dataset container")->required()->check(CLI::ExistingFile);
  rec->add_option("--truth", truth_path, "truth object (adds an OEC column)")->check(CLI::ExistingFile);
  add_config_flags(rec, rec_o, true);

  std::vector<double> separations_mm;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep-separation", "OEC and DEC against the slice separation");
  add_config_flags(sweep, sweep_o, true);
  sweep->get_option("--config")->required();
  sweep->add_option("-s,--separations-mm", separations_mm, "slice separations in mm")->required()->delimiter(',');
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");

  bool json = false, strict = false;
  auto* analyze = app.add_subcommand("analyze", "design report of the configured bench");
  analyze->add_option("-c,--config", an_o.config_path, "YAML run config")->check(CLI::ExistingFile);
  analyze->add_option("--segment-size", an_o.segment_size, "window side in pixels");
  analyze->add_flag("--json", json, "JSON output");
  analyze->add_flag("--strict", strict, "fail when the oversampling is below 2");

  std::string image_path, seeds_path, edges = "unmeasured", seg_dir;
  int lloyd = 0, seg_size = 0;
  auto* seg = app.add_subcommand("segment", "segment a raw detector image around seed positions");
  seg->add_option("image", image_path, "detector image (PGM)")->required()->check(CLI::ExistingFile);
  seg->add_option("seeds", seeds_path, "seed list, one 'row col' per line")->required()->check(CLI::ExistingFile);
  seg->add_option("--lloyd", lloyd, "Lloyd iterations")->check(CLI::NonNegativeNumber);
  seg->add_option("--segment-size", seg_size, "crop side in pixels (0 = largest disjoint)")->check(CLI::NonNegativeNumber);
  seg->add_option("--edges", edges, "crops leaving the detector")->check(CLI::IsMember({"unmeasured", "reject"}));
  seg->add_option("-o,--output-dir", seg_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (*sim) return cmd_simulate(sim_o, out);
    if (*rec) return cmd_reconstruct(rec_o, dataset_path, truth_path, out);
    if (*sweep) return cmd_sweep(sweep_o, separations_mm, threads, out);
    if (*analyze) return cmd_analyze(an_o, json, strict, out, err);
    if (*seg) return cmd_segment(image_path, seeds_path, lloyd, seg_size, edges, seg_dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return usage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical_failure;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return data_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return data_error;
  }
  return usage;
}

}  // namespace ssp3d::cli
