#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssp3d/object_stack.hpp"
#include "ssp3d/simulator.hpp"

namespace ssp3d {

/// Binary dataset container, little-endian throughout.
///
///   "3DSSP\0" | u16 version
///   f64 wavelength, f1, f2, detector pitch, delta
///   u32 detector rows, cols, N_p, N_s, segment size
///   f64[N_s - 1] slice spacings | f64[2 N_p] beamlet detector (X, Y)
///   u64 segment-map digest | u8 flags (1 masks, 2 reference, 4 labels)
///   f64[N_p M^2] patterns, row-major
///   [u8[N_p M^2] masks] [f64[N_p M^2] reference] [i32[rows cols] labels]
///
/// Slice positions are not stored; they follow from the header.
inline constexpr std::uint16_t kContainerVersion = 1;

std::vector<std::uint8_t> encode_dataset(const PtychoDataset& dataset);

/// Throws DataError naming the byte offset of the first bad field.
PtychoDataset decode_dataset(std::span<const std::uint8_t> bytes);

void write_dataset(const std::string& path, const PtychoDataset& dataset);
PtychoDataset read_dataset(const std::string& path);

/// Object stacks ("3DSSO\0", same version): u32 rows, cols, N_s; f64 pitch;
/// f64[N_s - 1] spacings; complex f64 pairs, slice by slice, row-major.
std::vector<std::uint8_t> encode_object(const ObjectStack& object);
ObjectStack decode_object(std::span<const std::uint8_t> bytes);
void write_object(const std::string& path, const ObjectStack& object);
ObjectStack read_object(const std::string& path);

}  // namespace ssp3d
