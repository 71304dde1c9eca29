// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_BINARY_IO_HPP_
#define ASTOI_BINARY_IO_HPP_

// Little-endian serialization shared by the model and dataset pack formats:
// 5-byte magic, u32 version, payload, trailing CRC32 of everything before it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "astoi/types.hpp"

namespace astoi {

class BinaryWriter {
 public:
  BinaryWriter(std::string_view magic, std::uint32_t version);

  void U8(std::uint8_t v) { buf_.push_back(v); }
  void U32(std::uint32_t v);
  void U64(std::uint64_t v);
  void F64(double v);
  void Doubles(const double* data, std::size_t n);
  /// Row-major dump of a matrix (shape is not written).
  void RowMajor(const Matrix& m);

  /// Appends the CRC and writes the file.
  void Save(const std::filesystem::path& path);

 private:
  std::vector<std::uint8_t> buf_;
};

class BinaryReader {
 public:
  /// Reads the whole file and checks magic, version and CRC. Throws IoError
  /// or FormatError.
  BinaryReader(const std::filesystem::path& path, std::string_view magic, std::uint32_t version);

  std::uint8_t U8();
  std::uint32_t U32();
  std::uint64_t U64();
  double F64();
  void Doubles(double* out, std::size_t n);
  Matrix RowMajor(Eigen::Index rows, Eigen::Index cols);
  bool AtEnd() const noexcept { return pos_ == end_; }

 private:
  void Need(std::size_t n);

  std::string name_;
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;  // payload end (before the CRC)
};

}  // namespace astoi

#endif  // ASTOI_BINARY_IO_HPP_
