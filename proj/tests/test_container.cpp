#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "fixtures.hpp"
#include "ssp3d/container.hpp"
#include "ssp3d/errors.hpp"

using namespace ssp3d;

namespace {

PtychoDataset small_dataset(bool reference) {
  const OpticalConfig c = fixtures::narrow_config(5e-3, {3e-3});
  const ObjectStack obj = fixtures::sample_object(2, 256, c.object_pitch(), {3e-3}, 0.05);
  SimulationOptions options;
  options.reference_patterns = reference;
  return simulate_dataset(fixtures::narrow_doe(), obj, c, options);
}

std::string error_of(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_dataset(bytes);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

void put_u16(std::vector<std::uint8_t>& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v & 0xff);
  b[at + 1] = static_cast<std::uint8_t>(v >> 8);
}

}  // namespace

TEST_CASE("dataset round trip is bit exact") {
  for (bool reference : {true, false}) {
    const PtychoDataset d = small_dataset(reference);
    const std::vector<std::uint8_t> bytes = encode_dataset(d);
    const PtychoDataset r = decode_dataset(bytes);
    CHECK(encode_dataset(r) == bytes);

    REQUIRE(r.patterns.size() == d.patterns.size());
    for (std::size_t j = 0; j < d.patterns.size(); ++j) {
      CHECK(std::memcmp(r.patterns[j].data(), d.patterns[j].data(), sizeof(double) * d.patterns[j].size()) == 0);
      CHECK((r.masks[j] == d.masks[j]).all());
    }
    CHECK(r.reference_patterns.size() == d.reference_patterns.size());
    CHECK(r.segment_map_digest == d.segment_map_digest);
    CHECK(r.segment_size == d.segment_size);
    CHECK(r.config.wavelength == d.config.wavelength);
    CHECK(r.config.delta == d.config.delta);
    CHECK(r.config.slice_spacings == d.config.slice_spacings);
    CHECK((r.geometry.segment_labels == d.geometry.segment_labels).all());
    REQUIRE(r.geometry.slice_positions.size() == d.geometry.slice_positions.size());
    for (std::size_t j = 0; j < d.geometry.slice_positions.size(); ++j)
      for (std::size_t s = 0; s < d.geometry.slice_positions[j].size(); ++s)
        CHECK((r.geometry.slice_positions[j][s] - d.geometry.slice_positions[j][s]).norm() == 0.0);
  }
}

TEST_CASE("dataset file round trip") {
  const PtychoDataset d = small_dataset(true);
  const auto path = std::filesystem::temp_directory_path() / "ssp3d_test_container.3dssp";
  write_dataset(path.string(), d);
  CHECK(encode_dataset(read_dataset(path.string())) == encode_dataset(d));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_dataset(path.string()), DataError);
}

TEST_CASE("corrupt containers name the offset") {
  const std::vector<std::uint8_t> good = encode_dataset(small_dataset(false));

  std::vector<std::uint8_t> bad = good;
  bad[0] = 'X';
  CHECK(error_of(bad).find("byte offset 0") != std::string::npos);

  bad = good;
  put_u16(bad, 6, kContainerVersion + 1);
  const std::string version = error_of(bad);
  CHECK(version.find("version") != std::string::npos);
  CHECK(version.find("byte offset 6") != std::string::npos);

  for (std::size_t cut : {std::size_t{3}, std::size_t{20}, std::size_t{60}, good.size() / 2, good.size() - 1}) {
    const std::vector<std::uint8_t> truncated(good.begin(), good.begin() + static_cast<long>(cut));
    const std::string e = error_of(truncated);
    CHECK_MESSAGE(e.find("byte offset") != std::string::npos, "cut at " << cut << ": " << e);
  }

  bad = good;
  bad.push_back(0);
  CHECK(error_of(bad).find("trailing") != std::string::npos);
}

TEST_CASE("object round trip") {
  const ObjectStack o = fixtures::sample_object(3, 48, 2e-6, {1e-3, 2e-3}, 0.1);
  const auto bytes = encode_object(o);
  const ObjectStack r = decode_object(bytes);
  CHECK(encode_object(r) == bytes);
  CHECK(r.spacings == o.spacings);
  CHECK(r.pitch == o.pitch);
  for (std::size_t s = 0; s < 3; ++s) CHECK((r.slices[s] == o.slices[s]).all());

  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 8);
  CHECK_THROWS_AS(decode_object(truncated), DataError);
  CHECK_THROWS_AS(decode_object(encode_dataset(small_dataset(false))), DataError);
}
