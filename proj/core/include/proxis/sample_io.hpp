#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "proxis/error.hpp"
#include "proxis/linops.hpp"

namespace proxis {

class SampleFileError : public Error {
 public:
  using Error::Error;
};

// Layout: "PXIS", u32 version, u32 rows, u32 cols (all little-endian), then
// rows*cols float64 values in row-major order.
inline constexpr char kSampleMagic[4] = {'P', 'X', 'I', 'S'};
inline constexpr std::uint32_t kSampleFormatVersion = 1;
inline constexpr std::size_t kSampleHeaderBytes = 16;

void write_samples(std::ostream& out, const Matrix& samples);
void write_samples(const std::filesystem::path& path, const Matrix& samples);

Matrix read_samples(std::istream& in);
Matrix read_samples(const std::filesystem::path& path);

}  // namespace proxis
