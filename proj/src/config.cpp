#include "ssp3d/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "ssp3d/errors.hpp"

namespace ssp3d {

namespace {

std::string where(const std::string& source, const YAML::Mark& mark) {
  if (mark.is_null()) return source;
  return source + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
}

// One mapping of the document; remembers which keys were read so leftovers
// can be reported.
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, "expected a mapping");
  }

  bool present() const { return node_ && node_.IsMap(); }

  Section child(const std::string& key) { return Section(take(key).value_or(YAML::Node()), field(key), source_); }

  void number(const std::string& key, double& out, double scale = 1.0) {
    if (const auto n = take(key)) out = to_double(*n, key) * scale;
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    const auto found = take(key);
    if (!found) return;
    const YAML::Node& n = *found;
    long long v = 0;
    if (!n.IsScalar() || !YAML::convert<long long>::decode(n, v)) fail(n, field(key) + ": expected an integer");
    if (v < static_cast<long long>(std::numeric_limits<Int>::min()) ||
        static_cast<unsigned long long>(v) > static_cast<unsigned long long>(std::numeric_limits<Int>::max()))
      fail(n, field(key) + ": out of range");
    out = static_cast<Int>(v);
  }

  void boolean(const std::string& key, bool& out) {
    const auto n = take(key);
    if (n && (!n->IsScalar() || !YAML::convert<bool>::decode(*n, out))) fail(*n, field(key) + ": expected true or false");
  }

  void text(const std::string& key, std::string& out) {
    const auto found = take(key);
    if (!found) return;
    const YAML::Node& n = *found;
    if (!n.IsScalar()) fail(n, field(key) + ": expected a string");
    out = n.Scalar();
  }

  void numbers(const std::string& key, std::vector<double>& out, double scale = 1.0) {
    const auto found = take(key);
    if (!found) return;
    const YAML::Node& n = *found;
    if (!n.IsSequence()) fail(n, field(key) + ": expected a list of numbers");
    out.clear();
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(to_double(n[i], key + "[" + std::to_string(i) + "]") * scale);
  }

  template <class Enum, class Parse>
  void choice(const std::string& key, Enum& out, Parse parse) {
    const auto found = take(key);
    if (!found) return;
    const YAML::Node& n = *found;
    if (!n.IsScalar()) fail(n, field(key) + ": expected a name");
    try {
      out = parse(n.Scalar());
    } catch (const std::invalid_argument& e) {
      fail(n, field(key) + ": " + e.what());
    }
  }

  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.Scalar();
      if (!used_.count(key)) fail(kv.first, field(key) + ": unknown key");
    }
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& message) const {
    throw ConfigError(where(source_, n.Mark()) + ": " + message);
  }

 private:
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  std::optional<YAML::Node> take(const std::string& key) {
    if (!present()) return std::nullopt;
    used_.insert(key);
    const YAML::Node n = std::as_const(node_)[key];
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    return n;
  }

  double to_double(const YAML::Node& n, const std::string& key) const {
    double v = 0.0;
    if (!n.IsScalar() || !YAML::convert<double>::decode(n, v)) fail(n, field(key) + ": expected a number");
    if (!std::isfinite(v)) fail(n, field(key) + ": must be finite");
    return v;
  }

  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

EdgePolicy parse_edges(const std::string& name) {
  if (name == "unmeasured") return EdgePolicy::unmeasured;
  if (name == "reject") return EdgePolicy::reject;
  throw std::invalid_argument("unknown edge policy '" + name + "' (unmeasured, reject)");
}

BeamletOrder parse_order(const std::string& name) {
  if (name == "sequential") return BeamletOrder::sequential;
  if (name == "shuffled") return BeamletOrder::shuffled;
  throw std::invalid_argument("unknown beamlet order '" + name + "' (sequential, shuffled)");
}

constexpr double nm = 1e-9, um = 1e-6, mm = 1e-3;

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source, bool validate) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(where(source, e.mark) + ": " + e.msg);
  }

  RunConfig c;
  Section root(doc, "", source);
  root.integer("seed", c.seed);
  root.text("output_dir", c.output_dir);
  root.text("dataset", c.dataset_path);

  Section optical = root.child("optical");
  OpticalConfig& o = c.optical;
  optical.number("wavelength_nm", o.wavelength, nm);
  optical.number("f1_mm", o.f1, mm);
  optical.number("f2_mm", o.f2, mm);
  optical.integer("detector_rows", o.detector_rows);
  optical.integer("detector_cols", o.detector_cols);
  optical.number("detector_pitch_um", o.detector_pitch, um);
  optical.number("delta_mm", o.delta, mm);
  optical.numbers("slice_spacings_mm", o.slice_spacings, mm);
  optical.finish();

  Section doe = root.child("doe");
  doe.integer("n_pinholes", c.doe.n_pinholes);
  doe.number("pinhole_radius_um", c.doe.pinhole_radius, um);
  doe.number("pattern_extent_mm", c.doe.pattern_extent, mm);
  doe.finish();

  Section sim = root.child("simulation");
  sim.integer("segment_size", c.simulation.segment_size);
  sim.integer("lloyd_iterations", c.simulation.lloyd_iterations);
  sim.number("photon_count", c.simulation.photon_count);
  sim.boolean("reference_patterns", c.simulation.reference_patterns);
  sim.choice("edges", c.simulation.edges, parse_edges);
  sim.finish();

  Section recon = root.child("recon");
  recon.integer("iterations", c.recon.max_iterations);
  recon.number("error_threshold", c.recon.error_threshold);
  recon.number("alpha", c.recon.alpha);
  recon.number("beta", c.recon.beta);
  recon.integer("probe_update_start", c.recon.probe_update_start);
  recon.choice("order", c.recon.order, parse_order);
  recon.integer("seed", c.recon.seed);
  recon.integer("starts", c.recon.starts);
  recon.integer("trial_iterations", c.recon.trial_iterations);
  recon.finish();

  Section phantom = root.child("phantom");
  if (phantom.present()) {
    PhantomSpec p;
    phantom.choice("kind", p.kind, parse_phantom_kind);
    phantom.number("feature_width_um", p.feature_width, um);
    phantom.number("size_mm", p.size, mm);
    phantom.number("transmission", p.transmission);
    phantom.number("phase_rad", p.phase);
    phantom.integer("count", p.count);
    phantom.integer("seed", p.seed);
    phantom.finish();
    c.phantom = p;
  }
  root.finish();

  if (validate) {
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::string& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path, validate);
}

std::string dump_config(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  if (!c.dataset_path.empty()) out << YAML::Key << "dataset" << YAML::Value << c.dataset_path;

  const OpticalConfig& o = c.optical;
  out << YAML::Key << "optical" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "wavelength_nm" << YAML::Value << o.wavelength / nm;
  out << YAML::Key << "f1_mm" << YAML::Value << o.f1 / mm;
  out << YAML::Key << "f2_mm" << YAML::Value << o.f2 / mm;
  out << YAML::Key << "detector_rows" << YAML::Value << o.detector_rows;
  out << YAML::Key << "detector_cols" << YAML::Value << o.detector_cols;
  out << YAML::Key << "detector_pitch_um" << YAML::Value << o.detector_pitch / um;
  out << YAML::Key << "delta_mm" << YAML::Value << o.delta / mm;
  out << YAML::Key << "slice_spacings_mm" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double s : o.slice_spacings) out << s / mm;
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "doe" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_pinholes" << YAML::Value << c.doe.n_pinholes;
  out << YAML::Key << "pinhole_radius_um" << YAML::Value << c.doe.pinhole_radius / um;
  out << YAML::Key << "pattern_extent_mm" << YAML::Value << c.doe.pattern_extent / mm;
  out << YAML::EndMap;

  const SimulationOptions& s = c.simulation;
  out << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "segment_size" << YAML::Value << s.segment_size;
  out << YAML::Key << "lloyd_iterations" << YAML::Value << s.lloyd_iterations;
  out << YAML::Key << "photon_count" << YAML::Value << s.photon_count;
  out << YAML::Key << "reference_patterns" << YAML::Value << s.reference_patterns;
  out << YAML::Key << "edges" << YAML::Value << (s.edges == EdgePolicy::reject ? "reject" : "unmeasured");
  out << YAML::EndMap;

  const ReconConfig& r = c.recon;
  out << YAML::Key << "recon" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "iterations" << YAML::Value << r.max_iterations;
  out << YAML::Key << "error_threshold" << YAML::Value << r.error_threshold;
  out << YAML::Key << "alpha" << YAML::Value << r.alpha;
  out << YAML::Key << "beta" << YAML::Value << r.beta;
  out << YAML::Key << "probe_update_start" << YAML::Value << r.probe_update_start;
  out << YAML::Key << "order" << YAML::Value << (r.order == BeamletOrder::shuffled ? "shuffled" : "sequential");
  out << YAML::Key << "seed" << YAML::Value << r.seed;
  out << YAML::Key << "starts" << YAML::Value << r.starts;
  out << YAML::Key << "trial_iterations" << YAML::Value << r.trial_iterations;
  out << YAML::EndMap;

  if (c.phantom) {
    const PhantomSpec& p = *c.phantom;
    out << YAML::Key << "phantom" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << to_string(p.kind);
    out << YAML::Key << "feature_width_um" << YAML::Value << p.feature_width / um;
    out << YAML::Key << "size_mm" << YAML::Value << p.size / mm;
    out << YAML::Key << "transmission" << YAML::Value << p.transmission;
    out << YAML::Key << "phase_rad" << YAML::Value << p.phase;
    out << YAML::Key << "count" << YAML::Value << p.count;
    out << YAML::Key << "seed" << YAML::Value << p.seed;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace ssp3d
