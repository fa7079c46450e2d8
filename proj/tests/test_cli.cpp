#include "doctest.h"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cli.hpp"
#include "ssp3d/container.hpp"
#include "ssp3d/image_io.hpp"

using namespace ssp3d;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ssp3d");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ssp3d_cli_" + name);
  fs::remove_all(p);
  return p;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

// 256 px bench, nine beamlets, crossed hairs 1 mm apart.
const char* kSmall = R"(seed: 4
optical:
  detector_rows: 256
  detector_cols: 256
  delta_mm: 5
  slice_spacings_mm: [1]
doe:
  n_pinholes: 9
  pinhole_radius_um: 21.2
  pattern_extent_mm: 1.06
recon:
  iterations: 2
phantom:
  kind: hair_cross
  feature_width_um: 600
  transmission: 0.2
)";

const fs::path kConfigs = fs::path(SSP3D_SOURCE_DIR) / "configs";

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::usage);
  CHECK(run({"teleport"}).code == cli::usage);
  CHECK(run({"simulate"}).code == cli::usage);
  CHECK(run({"reconstruct", "/no/such/file"}).code == cli::usage);
  CHECK(run({"--help"}).code == cli::ok);

  const fs::path bad = write_file(scratch("bad.yaml"), "optical:\n  wavelenght_nm: 532\n");
  const Result r = run({"simulate", "-c", bad.string()});
  CHECK(r.code == cli::usage);
  CHECK(r.err.find(":2:3: optical.wavelenght_nm: unknown key") != std::string::npos);
  fs::remove(bad);
}

TEST_CASE("analyze the full-size bench") {
  const std::string config = (kConfigs / "paper_analyze.yaml").string();
  const Result text = run({"analyze", "-c", config});
  REQUIRE(text.code == cli::ok);
  CHECK(text.out.find("axial_resolution_m=0.000154") != std::string::npos);

  const Result js = run({"analyze", "-c", config, "--json"});
  REQUIRE(js.code == cli::ok);
  const auto j = nlohmann::json::parse(js.out);
  CHECK(j["axial_resolution_m"].get<double>() == doctest::Approx(154e-6).epsilon(0.01));
  CHECK(j["axial_extent_m"].get<double>() == doctest::Approx(1.4e-2).epsilon(0.05));
  CHECK(j["imaging_volume_m3"].get<double>() == doctest::Approx(75e-9).epsilon(0.2));
  CHECK(j["overlap_table"].size() == 11);
  CHECK(nlohmann::json::parse(j.dump()) == j);
}

TEST_CASE("strict analyze fails on low oversampling") {
  // sigma = r_p / (1.22 dX) = 1.5
  const fs::path cfg = write_file(scratch("sigma.yaml"), "doe:\n  pinhole_radius_um: 9.699\n");
  const Result lax = run({"analyze", "-c", cfg.string(), "--segment-size", "300"});
  CHECK(lax.code == cli::ok);
  CHECK(lax.err.find("below 2") != std::string::npos);
  CHECK(run({"analyze", "-c", cfg.string(), "--segment-size", "300", "--strict"}).code != cli::ok);
  fs::remove(cfg);
}

TEST_CASE("simulate, reconstruct and errors") {
  const fs::path cfg = write_file(scratch("small.yaml"), kSmall);
  const fs::path a = scratch("sim_a"), b = scratch("sim_b") / "nested" / "dir";

  REQUIRE(run({"simulate", "-c", cfg.string(), "-o", a.string()}).code == cli::ok);
  REQUIRE(run({"simulate", "-c", cfg.string(), "-o", b.string()}).code == cli::ok);
  CHECK(slurp(a / "dataset.3dssp") == slurp(b / "dataset.3dssp"));
  CHECK(slurp(a / "segments" / "segment_00.pgm") == slurp(b / "segments" / "segment_00.pgm"));
  const PtychoDataset data = read_dataset((a / "dataset.3dssp").string());
  CHECK(data.n_beamlets() == 9);
  CHECK(fs::exists(a / "segments" / "segment_08.pgm"));
  CHECK(fs::exists(a / "truth_slice01_phase.ppm"));

  SUBCASE("unwritable output") {
    const fs::path file = write_file(scratch("plain_file"), "x");
    const Result r = run({"simulate", "-c", cfg.string(), "-o", (file / "sub").string()});
    CHECK(r.code == cli::data_error);
    fs::remove(file);
  }

  SUBCASE("zero iterations emit free-space slices") {
    const fs::path out = scratch("rec0");
    REQUIRE(run({"reconstruct", (a / "dataset.3dssp").string(), "--iterations", "0", "-o", out.string()}).code ==
            cli::ok);
    const ObjectStack obj = read_object((out / "object.3dsso").string());
    REQUIRE(obj.n_slices() == 2);
    for (const CArray& s : obj.slices) CHECK((s == Complex(1.0, 0.0)).all());
    for (const char* f : {"slice00_amplitude.pgm", "slice00_phase.ppm", "slice01_amplitude.pgm", "slice01_phase.ppm"})
      CHECK(fs::exists(out / f));
    CHECK(slurp(out / "errors.csv").rfind("iteration,dec\n0,", 0) == 0);
    fs::remove_all(out);
  }

  SUBCASE("truth adds an OEC column") {
    const fs::path out = scratch("rec_truth");
    const Result r = run({"reconstruct", (a / "dataset.3dssp").string(), "-c", cfg.string(), "--truth",
                          (a / "truth.3dsso").string(), "-o", out.string()});
    REQUIRE(r.code == cli::ok);
    std::istringstream csv(slurp(out / "errors.csv"));
    std::string line;
    int rows = 0;
    std::getline(csv, line);
    CHECK(line == "iteration,dec,oec");
    while (std::getline(csv, line)) {
      CHECK(std::count(line.begin(), line.end(), ',') == 2);
      ++rows;
    }
    CHECK(rows == 3);
    fs::remove_all(out);
  }

  SUBCASE("corrupt container") {
    std::string bytes = slurp(a / "dataset.3dssp");
    bytes.resize(bytes.size() / 3);
    const fs::path bad = write_file(scratch("bad.3dssp"), bytes);
    const Result r = run({"reconstruct", bad.string(), "-o", scratch("rec_bad").string()});
    CHECK(r.code == cli::data_error);
    CHECK(r.err.find("byte offset") != std::string::npos);
    fs::remove(bad);
  }

  SUBCASE("truth on the wrong grid") {
    const Result r = run({"reconstruct", (a / "dataset.3dssp").string(), "--truth",
                          (a / "dataset.3dssp").string(), "-o", scratch("rec_wrong").string()});
    CHECK(r.code == cli::data_error);
  }

  SUBCASE("output directory from the environment") {
    const fs::path env_dir = scratch("env_out");
    ::setenv(cli::kOutputDirEnv, env_dir.string().c_str(), 1);
    const Result r = run({"simulate", "-c", cfg.string()});
    ::unsetenv(cli::kOutputDirEnv);
    CHECK(r.code == cli::ok);
    CHECK(fs::exists(env_dir / "dataset.3dssp"));
    fs::remove_all(env_dir);
  }

  fs::remove_all(a);
  fs::remove_all(scratch("sim_b"));
  fs::remove(cfg);
}

TEST_CASE("sweep writes a table and plots") {
  const fs::path cfg = write_file(scratch("sweep.yaml"), kSmall);
  const fs::path out = scratch("sweep_out");
  const Result r = run({"sweep-separation", "-c", cfg.string(), "-s", "0,0.5", "--iterations", "1", "-o", out.string()});
  REQUIRE(r.code == cli::ok);
  std::istringstream csv(slurp(out / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "separation_um,oec,dec,dec_normalized,product_oec,oec_slice0,oec_slice1,iterations");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2);
  CHECK(fs::exists(out / "oec_vs_separation.ppm"));
  CHECK(fs::exists(out / "dec_vs_separation.ppm"));
  CHECK(run({"sweep-separation", "-c", cfg.string(), "-s", "1", "-o", out.string()}).code == cli::usage);
  fs::remove_all(out);
  fs::remove(cfg);
}

TEST_CASE("segment a raw detector image") {
  const fs::path dir = scratch("segment");
  fs::create_directories(dir);
  RArray image = RArray::Zero(64, 96);
  const std::vector<std::pair<int, int>> seeds{{16, 20}, {16, 70}, {45, 30}, {48, 75}};
  for (auto [sr, sc] : seeds)
    for (Eigen::Index r = 0; r < 64; ++r)
      for (Eigen::Index c = 0; c < 96; ++c) image(r, c) += 200.0 * std::exp(-(std::pow(r - sr, 2) + std::pow(c - sc, 2)) / 20.0);
  write_pgm((dir / "det.pgm").string(), image, 0.0, 255.0);
  write_file(dir / "seeds.txt", "# row col\n16 20\n16, 70\n\n45 30\n48 75\n");

  const Result r = run({"segment", (dir / "det.pgm").string(), (dir / "seeds.txt").string(), "-o", (dir / "out").string()});
  REQUIRE(r.code == cli::ok);
  CHECK(r.out.find("beamlets      4") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "labels.pgm"));
  CHECK(fs::exists(dir / "out" / "segments" / "segment_03.pgm"));
  std::istringstream csv(slurp(dir / "out" / "segments.csv"));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  int beamlet = -1, row = 0, col = 0;
  char comma = 0;
  std::istringstream(line) >> beamlet >> comma >> row >> comma >> col;
  CHECK(beamlet == 0);
  CHECK(std::abs(row - 16) <= 1);
  CHECK(std::abs(col - 20) <= 1);

  write_file(dir / "bad_seeds.txt", "16 20\nsixteen 70\n");
  const Result bad = run({"segment", (dir / "det.pgm").string(), (dir / "bad_seeds.txt").string(), "-o", (dir / "out").string()});
  CHECK(bad.code == cli::data_error);
  CHECK(bad.err.find("bad_seeds.txt:2") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("hair-cross config simulates the 40-beamlet spiral") {
  const fs::path out = scratch("hair");
  const Result r = run({"simulate", "-c", (kConfigs / "hair_cross.yaml").string(), "-o", out.string()});
  REQUIRE(r.code == cli::ok);
  const PtychoDataset data = read_dataset((out / "dataset.3dssp").string());
  CHECK(data.n_beamlets() == 40);
  CHECK(data.segment_size == 300);
  CHECK(data.config.slice_spacings == std::vector<double>{5e-3});
  fs::remove_all(out);
}
