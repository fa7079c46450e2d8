#include "ssp3d/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ssp3d/errors.hpp"

namespace ssp3d {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(255.0 * v), 0L, 255L)); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

void write_ppm(const std::string& path, const std::vector<Rgb>& pixels, int width, int height) {
  std::ofstream out = open_out(path);
  out << "P6\n" << width << ' ' << height << "\n255\n";
  for (const Rgb& p : pixels) out.write(reinterpret_cast<const char*>(p.data()), 3);
  if (!out) throw DataError("write to '" + path + "' failed");
}

// HSV with full saturation; h in turns.
Rgb hue(double h, double value) {
  h -= std::floor(h);
  const double x = 6.0 * h;
  const int sector = std::min(5, static_cast<int>(x));
  const double f = x - sector;
  const double q = 1.0 - f;
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = 1; g = f; break;
    case 1: r = q; g = 1; break;
    case 2: g = 1; b = f; break;
    case 3: g = q; b = 1; break;
    case 4: r = f; b = 1; break;
    default: r = 1; b = q; break;
  }
  return {to_byte(r * value), to_byte(g * value), to_byte(b * value)};
}

// PGM header token, skipping comments.
std::string token(std::istream& in, const std::string& path) {
  std::string t;
  while (in >> t) {
    if (t[0] != '#') return t;
    std::string rest;
    std::getline(in, rest);
  }
  throw DataError(path + ": truncated PGM header");
}

long header_number(std::istream& in, const std::string& path, const char* what) {
  const std::string t = token(in, path);
  try {
    std::size_t used = 0;
    const long v = std::stol(t, &used);
    if (used != t.size() || v <= 0) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw DataError(path + ": bad PGM " + what + " '" + t + "'");
  }
}

}  // namespace

void write_pgm(const std::string& path, const RArray& image, double lo, double hi) {
  if (image.size() == 0) throw std::invalid_argument("write_pgm: empty image");
  if (lo == hi) {
    lo = image.minCoeff();
    hi = image.maxCoeff();
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out = open_out(path);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const double v = std::isfinite(image(r, c)) ? (image(r, c) - lo) / span : 0.0;
      out.put(static_cast<char>(to_byte(v)));
    }
  if (!out) throw DataError("write to '" + path + "' failed");
}

void write_log_pgm(const std::string& path, const RArray& intensity) {
  const double peak = intensity.size() ? intensity.maxCoeff() : 0.0;
  const double floor = peak > 0.0 ? 1e-6 * peak : 1.0;
  write_pgm(path, (1.0 + intensity.max(0.0) / floor).log10());
}

void write_phase_ppm(const std::string& path, const CArray& field) {
  if (field.size() == 0) throw std::invalid_argument("write_phase_ppm: empty field");
  const double peak = field.abs().maxCoeff();
  std::vector<Rgb> pixels;
  pixels.reserve(static_cast<std::size_t>(field.size()));
  for (Eigen::Index r = 0; r < field.rows(); ++r)
    for (Eigen::Index c = 0; c < field.cols(); ++c) {
      const Complex v = field(r, c);
      pixels.push_back(hue(std::arg(v) / (2.0 * std::numbers::pi), peak > 0.0 ? std::abs(v) / peak : 0.0));
    }
  write_ppm(path, pixels, static_cast<int>(field.cols()), static_cast<int>(field.rows()));
}

RArray read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  const std::string magic = token(in, path);
  if (magic != "P5" && magic != "P2") throw DataError(path + ": not a PGM file (magic '" + magic + "')");
  const long width = header_number(in, path, "width");
  const long height = header_number(in, path, "height");
  const long maxval = header_number(in, path, "maxval");
  if (maxval > 65535) throw DataError(path + ": PGM maxval above 65535");
  RArray out(height, width);
  if (magic == "P2") {
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      long v = 0;
      if (!(in >> v) || v < 0 || v > maxval) throw DataError(path + ": bad pixel value at index " + std::to_string(i));
      out(i) = static_cast<double>(v);
    }
    return out;
  }
  in.get();  // single whitespace after the header
  const int bytes = maxval > 255 ? 2 : 1;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    unsigned char b[2] = {0, 0};
    if (!in.read(reinterpret_cast<char*>(b), bytes))
      throw DataError(path + ": truncated PGM data at pixel " + std::to_string(i));
    out(i) = bytes == 2 ? static_cast<double>((b[0] << 8) | b[1]) : static_cast<double>(b[0]);
  }
  return out;
}

void write_line_plot(const std::string& path, const std::vector<double>& x, const std::vector<double>& y,
                     double marker, int width, int height) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("write_line_plot: need >= 2 matching points");
  if (width < 32 || height < 32) throw std::invalid_argument("write_line_plot: canvas too small");
  std::vector<Rgb> pixels(static_cast<std::size_t>(width) * height, Rgb{255, 255, 255});
  auto put = [&](int px, int py, Rgb color) {
    if (px >= 0 && px < width && py >= 0 && py < height) pixels[static_cast<std::size_t>(py) * width + px] = color;
  };
  const int margin = 24;
  const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  double xmin = *xmin_it, xmax = *xmax_it, ymin = *ymin_it, ymax = *ymax_it;
  if (std::isfinite(marker)) {
    xmin = std::min(xmin, marker);
    xmax = std::max(xmax, marker);
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  auto sx = [&](double v) { return margin + static_cast<int>(std::lround((v - xmin) / (xmax - xmin) * (width - 2 * margin))); };
  auto sy = [&](double v) {
    return height - margin - static_cast<int>(std::lround((v - ymin) / (ymax - ymin) * (height - 2 * margin)));
  };

  const Rgb axis{0, 0, 0}, line{31, 119, 180}, red{214, 39, 40};
  for (int px = margin; px <= width - margin; ++px) put(px, height - margin, axis);
  for (int py = margin; py <= height - margin; ++py) put(margin, py, axis);
  if (std::isfinite(marker)) {
    const int mx = sx(marker);
    for (int py = margin; py <= height - margin; ++py)
      if ((py / 4) % 2 == 0) put(mx, py, red);
  }

  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const int x0 = sx(x[order[k]]), y0 = sy(y[order[k]]), x1 = sx(x[order[k + 1]]), y1 = sy(y[order[k + 1]]);
    const int steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1});
    for (int t = 0; t <= steps; ++t)
      put(x0 + (x1 - x0) * t / steps, y0 + (y1 - y0) * t / steps, line);
  }
  for (std::size_t i : order)
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) put(sx(x[i]) + dx, sy(y[i]) + dy, line);
  write_ppm(path, pixels, width, height);
}

}  // namespace ssp3d
