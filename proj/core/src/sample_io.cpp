#include "proxis/sample_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace proxis {

namespace {

static_assert(std::numeric_limits<double>::is_iec559);

template <class T>
void put_le(std::vector<unsigned char>& buf, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(v);
  for (std::size_t k = 0; k < sizeof(T); ++k) buf.push_back(static_cast<unsigned char>(bits >> (8 * k)));
}

template <class U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) v |= static_cast<U>(p[k]) << (8 * k);
  return v;
}

}  // namespace

void write_samples(std::ostream& out, const Matrix& samples) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (static_cast<std::uint64_t>(samples.rows()) > kMax ||
      static_cast<std::uint64_t>(samples.cols()) > kMax) {
    throw SampleFileError("write_samples: matrix too large for the sample format");
  }
  std::vector<unsigned char> buf;
  buf.reserve(kSampleHeaderBytes + 8 * static_cast<std::size_t>(samples.size()));
  buf.insert(buf.end(), std::begin(kSampleMagic), std::end(kSampleMagic));
  put_le(buf, kSampleFormatVersion);
  put_le(buf, static_cast<std::uint32_t>(samples.rows()));
  put_le(buf, static_cast<std::uint32_t>(samples.cols()));
  for (Index i = 0; i < samples.rows(); ++i) {
    for (Index j = 0; j < samples.cols(); ++j) put_le(buf, samples(i, j));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw SampleFileError("write_samples: stream write failed");
}

void write_samples(const std::filesystem::path& path, const Matrix& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SampleFileError("cannot open " + path.string() + " for writing");
  write_samples(out, samples);
}

Matrix read_samples(std::istream& in) {
  std::array<unsigned char, kSampleHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    throw SampleFileError("sample file truncated: incomplete header");
  }
  if (std::memcmp(header.data(), kSampleMagic, 4) != 0) {
    throw SampleFileError("not a sample file: bad magic");
  }
  const auto version = get_le<std::uint32_t>(header.data() + 4);
  if (version != kSampleFormatVersion) {
    throw SampleFileError("unsupported sample file version " + std::to_string(version));
  }
  const auto rows = get_le<std::uint32_t>(header.data() + 8);
  const auto cols = get_le<std::uint32_t>(header.data() + 12);
  const std::uint64_t count = std::uint64_t{rows} * cols;
  if (count > (std::uint64_t{1} << 34)) throw SampleFileError("sample file dimensions implausibly large");

  std::vector<unsigned char> body(static_cast<std::size_t>(count * 8));
  in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (in.gcount() != static_cast<std::streamsize>(body.size())) {
    throw SampleFileError("sample file truncated: expected " + std::to_string(count) + " values");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw SampleFileError("sample file has trailing bytes after " + std::to_string(count) + " values");
  }
  Matrix m(rows, cols);
  const unsigned char* p = body.data();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j, p += 8) m(i, j) = std::bit_cast<double>(get_le<std::uint64_t>(p));
  }
  return m;
}

Matrix read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SampleFileError("cannot open " + path.string());
  return read_samples(in);
}

}  // namespace proxis
