#include "ssp3d/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "ssp3d/doe.hpp"
#include "ssp3d/errors.hpp"

namespace ssp3d {

namespace {

constexpr char kDatasetMagic[6] = {'3', 'D', 'S', 'S', 'P', '\0'};
constexpr char kObjectMagic[6] = {'3', 'D', 'S', 'S', 'O', '\0'};
constexpr std::uint8_t kHasMasks = 1, kHasReference = 2, kHasLabels = 4;

class Writer {
 public:
  void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i32(std::int32_t v) { le(static_cast<std::uint32_t>(v), 4); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void count(std::size_t v, const char* what) {
    if (v > 0xffffffffu) throw std::invalid_argument(std::string("container: ") + what + " too large");
    u32(static_cast<std::uint32_t>(v));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void magic(const char (&expected)[6], const char* kind) {
    need(6, "magic");
    if (std::memcmp(bytes_.data(), expected, 6) != 0) fail(std::string("not a ") + kind + " file (bad magic)");
    pos_ = 6;
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }
  std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(le(2, what)); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(le(4, what)); }
  std::uint64_t u64(const char* what) { return le(8, what); }
  std::int32_t i32(const char* what) { return static_cast<std::int32_t>(u32(what)); }
  double f64(const char* what) { return std::bit_cast<double>(le(8, what)); }
  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void fail(const std::string& message) const { fail_at(pos_, message); }
  [[noreturn]] static void fail_at(std::size_t offset, const std::string& message) {
    throw DataError("container: " + message + " at byte offset " + std::to_string(offset));
  }
  /// Fails unless `n` more items of `size` bytes are present.
  void need_items(std::uint64_t n, std::size_t size, const char* what) const {
    if (n > remaining() / size) fail(std::string("truncated ") + what);
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) fail(std::string("truncated ") + what);
  }
  std::uint64_t le(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void version(Reader& in) {
  const std::size_t at = in.offset();
  const std::uint16_t v = in.u16("version");
  if (v != kContainerVersion)
    Reader::fail_at(at, "unsupported format version " + std::to_string(v) + " (expected " +
                            std::to_string(kContainerVersion) + ")");
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write to '" + path + "' failed");
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<std::uint8_t> encode_dataset(const PtychoDataset& d) {
  d.validate();
  const auto& c = d.config;
  const std::size_t np = d.n_beamlets();
  Writer w;
  w.raw(kDatasetMagic, 6);
  w.u16(kContainerVersion);
  for (double v : {c.wavelength, c.f1, c.f2, c.detector_pitch, c.delta}) w.f64(v);
  w.count(static_cast<std::size_t>(c.detector_rows), "detector rows");
  w.count(static_cast<std::size_t>(c.detector_cols), "detector cols");
  w.count(np, "beamlet count");
  w.count(c.n_slices(), "slice count");
  w.count(static_cast<std::size_t>(d.segment_size), "segment size");
  for (double s : c.slice_spacings) w.f64(s);
  for (const Vec2& p : d.geometry.detector_positions) {
    w.f64(p.x());
    w.f64(p.y());
  }
  w.u64(d.segment_map_digest);
  const bool labels = d.geometry.segment_labels.size() > 0;
  w.u8(static_cast<std::uint8_t>((d.masks.empty() ? 0 : kHasMasks) | (d.reference_patterns.empty() ? 0 : kHasReference) |
                                 (labels ? kHasLabels : 0)));
  for (const RArray& p : d.patterns)
    for (Eigen::Index i = 0; i < p.size(); ++i) w.f64(p(i));
  for (const MaskArray& k : d.masks)
    for (Eigen::Index i = 0; i < k.size(); ++i) w.u8(k(i) ? 1 : 0);
  for (const RArray& p : d.reference_patterns)
    for (Eigen::Index i = 0; i < p.size(); ++i) w.f64(p(i));
  if (labels) {
    if (d.geometry.segment_labels.rows() != c.detector_rows || d.geometry.segment_labels.cols() != c.detector_cols)
      throw std::invalid_argument("container: segment labels do not match the detector");
    for (Eigen::Index i = 0; i < d.geometry.segment_labels.size(); ++i) w.i32(d.geometry.segment_labels(i));
  }
  return w.take();
}

PtychoDataset decode_dataset(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.magic(kDatasetMagic, "3DSSP dataset");
  version(in);
  PtychoDataset d;
  auto& c = d.config;
  c.wavelength = in.f64("wavelength");
  c.f1 = in.f64("f1");
  c.f2 = in.f64("f2");
  c.detector_pitch = in.f64("detector pitch");
  c.delta = in.f64("delta");
  c.detector_rows = in.u32("detector rows");
  c.detector_cols = in.u32("detector cols");
  const std::size_t header_counts = in.offset();
  const std::uint32_t np = in.u32("beamlet count");
  const std::uint32_t ns = in.u32("slice count");
  const std::uint32_t m = in.u32("segment size");
  if (ns == 0) Reader::fail_at(header_counts + 4, "slice count is zero");
  if (np == 0) Reader::fail_at(header_counts, "beamlet count is zero");
  if (m < 2 || m % 2 != 0) Reader::fail_at(header_counts + 8, "segment size must be even and >= 2");
  in.need_items(ns - 1, 8, "slice spacings");
  for (std::uint32_t s = 0; s + 1 < ns; ++s) c.slice_spacings.push_back(in.f64("slice spacing"));
  in.need_items(2ull * np, 8, "beamlet positions");
  for (std::uint32_t j = 0; j < np; ++j) {
    const double x = in.f64("beamlet X");
    d.geometry.detector_positions.emplace_back(x, in.f64("beamlet Y"));
  }
  d.segment_map_digest = in.u64("segment-map digest");
  const std::size_t flag_at = in.offset();
  const std::uint8_t flags = in.u8("flags");
  if (flags & ~(kHasMasks | kHasReference | kHasLabels)) Reader::fail_at(flag_at, "unknown flag bits");
  const std::uint64_t pixels = std::uint64_t(m) * m;

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    Reader::fail_at(6 + 2, std::string("invalid optical header: ") + e.what());
  }
  d.segment_size = static_cast<int>(m);

  auto read_images = [&](std::vector<RArray>& out, const char* what) {
    in.need_items(np * pixels, 8, what);
    for (std::uint32_t j = 0; j < np; ++j) {
      RArray a(m, m);
      for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = in.f64(what);
      out.push_back(std::move(a));
    }
  };
  const std::size_t patterns_at = in.offset();
  read_images(d.patterns, "patterns");
  if (flags & kHasMasks) {
    in.need_items(np * pixels, 1, "masks");
    for (std::uint32_t j = 0; j < np; ++j) {
      MaskArray k(m, m);
      for (Eigen::Index i = 0; i < k.size(); ++i) {
        const std::uint8_t b = in.u8("masks");
        if (b > 1) in.fail("mask byte other than 0 or 1");
        k(i) = b == 1;
      }
      d.masks.push_back(std::move(k));
    }
  }
  if (flags & kHasReference) read_images(d.reference_patterns, "reference patterns");
  if (flags & kHasLabels) {
    in.need_items(std::uint64_t(c.detector_rows) * c.detector_cols, 4, "segment labels");
    d.geometry.segment_labels.resize(c.detector_rows, c.detector_cols);
    for (Eigen::Index i = 0; i < d.geometry.segment_labels.size(); ++i) d.geometry.segment_labels(i) = in.i32("labels");
  }
  if (in.remaining() != 0) in.fail("trailing bytes");

  d.geometry.slice_positions = beamlet_slice_positions(d.geometry.detector_positions, c.delta, c.slice_spacings, c.f2);
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    Reader::fail_at(patterns_at, std::string("invalid payload: ") + e.what());
  }
  return d;
}

void write_dataset(const std::string& path, const PtychoDataset& dataset) { write_bytes(path, encode_dataset(dataset)); }

PtychoDataset read_dataset(const std::string& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_dataset(bytes);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_object(const ObjectStack& o) {
  o.validate();
  Writer w;
  w.raw(kObjectMagic, 6);
  w.u16(kContainerVersion);
  w.count(static_cast<std::size_t>(o.rows()), "rows");
  w.count(static_cast<std::size_t>(o.cols()), "cols");
  w.count(o.n_slices(), "slice count");
  w.f64(o.pitch);
  for (double s : o.spacings) w.f64(s);
  for (const CArray& s : o.slices)
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      w.f64(s(i).real());
      w.f64(s(i).imag());
    }
  return w.take();
}

ObjectStack decode_object(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.magic(kObjectMagic, "3DSSP object");
  version(in);
  const std::uint32_t rows = in.u32("rows"), cols = in.u32("cols");
  const std::size_t ns_at = in.offset();
  const std::uint32_t ns = in.u32("slice count");
  if (ns == 0) Reader::fail_at(ns_at, "slice count is zero");
  ObjectStack o;
  o.pitch = in.f64("pitch");
  in.need_items(ns - 1, 8, "slice spacings");
  for (std::uint32_t s = 0; s + 1 < ns; ++s) o.spacings.push_back(in.f64("slice spacing"));
  in.need_items(std::uint64_t(ns) * rows * cols, 16, "slices");
  for (std::uint32_t s = 0; s < ns; ++s) {
    CArray a(rows, cols);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double re = in.f64("slice");
      a(i) = Complex(re, in.f64("slice"));
    }
    o.slices.push_back(std::move(a));
  }
  if (in.remaining() != 0) in.fail("trailing bytes");
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    Reader::fail_at(8, std::string("invalid object header: ") + e.what());
  }
  return o;
}

void write_object(const std::string& path, const ObjectStack& object) { write_bytes(path, encode_object(object)); }

ObjectStack read_object(const std::string& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_object(bytes);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace ssp3d
