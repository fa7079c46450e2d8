#pragma once

#include <string>
#include <vector>

#include "ssp3d/types.hpp"

namespace ssp3d {

/// 8-bit grayscale (binary PGM). Values are mapped linearly from [lo, hi];
/// lo == hi selects the image's own range.
void write_pgm(const std::string& path, const RArray& image, double lo = 0.0, double hi = 0.0);

/// log10(1 + I / (1e-6 max I)) preview of an intensity, own range.
void write_log_pgm(const std::string& path, const RArray& intensity);

/// Complex field as RGB (binary PPM): hue = phase (0 -> red, cyclic),
/// brightness = amplitude / max amplitude.
void write_phase_ppm(const std::string& path, const CArray& field);

/// Reads binary (P5) or ASCII (P2) PGM, 8 or 16 bit. Throws DataError.
RArray read_pgm(const std::string& path);

/// One line series on a white canvas, with an optional vertical dashed marker
/// at x = marker (skipped when NaN). Binary PPM.
void write_line_plot(const std::string& path, const std::vector<double>& x, const std::vector<double>& y,
                     double marker, int width = 480, int height = 320);

}  // namespace ssp3d
