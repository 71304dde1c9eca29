// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/binary_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "astoi/errors.hpp"

namespace astoi {

namespace {

// magic | u32 version | u64 payload length
constexpr std::size_t kMagicLen = 5;
constexpr std::size_t kHeaderLen = kMagicLen + 4 + 8;

std::uint32_t Crc32(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint64_t LoadLe(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

BinaryWriter::BinaryWriter(std::string_view magic, std::uint32_t version) {
  if (magic.size() != kMagicLen) throw InvalidArgument("magic must be 5 bytes");
  buf_.insert(buf_.end(), magic.begin(), magic.end());
  U32(version);
  U64(0);  // payload length, patched in Save
}

void BinaryWriter::U32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::U64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::Doubles(const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) F64(data[i]);
}

void BinaryWriter::RowMajor(const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) F64(m(r, c));
  }
}

void BinaryWriter::Save(const std::filesystem::path& path) {
  std::vector<std::uint8_t> out = buf_;
  const std::uint64_t payload = out.size() - kHeaderLen;
  for (int i = 0; i < 8; ++i) out[kMagicLen + 4 + i] = static_cast<std::uint8_t>(payload >> (8 * i));
  const std::uint32_t crc = Crc32(out.data(), out.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for '" + path.string() + "'");
}

BinaryReader::BinaryReader(const std::filesystem::path& path, std::string_view magic,
                           std::uint32_t version)
    : name_(path.string()) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + name_ + "'");
  buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());

  if (buf_.size() < kMagicLen || std::memcmp(buf_.data(), magic.data(), kMagicLen) != 0) {
    throw FormatError(FormatError::Kind::kBadMagic, "'" + name_ + "' is not a " + std::string(magic) + " file");
  }
  if (buf_.size() < kHeaderLen) throw FormatError(FormatError::Kind::kTruncated, "'" + name_ + "' is truncated");
  const auto file_version = static_cast<std::uint32_t>(LoadLe(buf_.data() + kMagicLen, 4));
  if (file_version != version) {
    throw FormatError(FormatError::Kind::kBadVersion, "'" + name_ + "' has format version " +
                                                          std::to_string(file_version) + ", expected " +
                                                          std::to_string(version));
  }
  const std::uint64_t payload = LoadLe(buf_.data() + kMagicLen + 4, 8);
  if (buf_.size() - kHeaderLen < 4 || payload > buf_.size() - kHeaderLen - 4) {
    throw FormatError(FormatError::Kind::kTruncated, "'" + name_ + "' is truncated");
  }
  end_ = kHeaderLen + static_cast<std::size_t>(payload);
  if (buf_.size() != end_ + 4) {
    throw FormatError(FormatError::Kind::kMalformed, "'" + name_ + "' has trailing bytes");
  }
  const auto stored = static_cast<std::uint32_t>(LoadLe(buf_.data() + end_, 4));
  if (stored != Crc32(buf_.data(), end_)) {
    throw FormatError(FormatError::Kind::kChecksum, "CRC mismatch in '" + name_ + "'");
  }
  pos_ = kHeaderLen;
}

void BinaryReader::Need(std::size_t n) {
  if (end_ - pos_ < n) throw FormatError(FormatError::Kind::kTruncated, "unexpected end of '" + name_ + "'");
}

std::uint8_t BinaryReader::U8() {
  Need(1);
  return buf_[pos_++];
}

std::uint32_t BinaryReader::U32() {
  Need(4);
  const auto v = static_cast<std::uint32_t>(LoadLe(buf_.data() + pos_, 4));
  pos_ += 4;
  return v;
}

std::uint64_t BinaryReader::U64() {
  Need(8);
  const std::uint64_t v = LoadLe(buf_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

double BinaryReader::F64() { return std::bit_cast<double>(U64()); }

void BinaryReader::Doubles(double* out, std::size_t n) {
  Need(8 * n);
  for (std::size_t i = 0; i < n; ++i) out[i] = F64();
}

Matrix BinaryReader::RowMajor(Eigen::Index rows, Eigen::Index cols) {
  Need(static_cast<std::size_t>(rows * cols) * 8);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = F64();
  }
  return m;
}

}  // namespace astoi
