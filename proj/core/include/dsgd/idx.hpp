// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// IDX binary files: a 4-byte big-endian magic, big-endian 32-bit dimensions,
// then unsigned bytes. Gzip-wrapped files are detected by their 1f 8b prefix
// and inflated transparently.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsgd {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

enum class IdxErrorKind {
  kIo,
  kWrongMagic,
  kTruncated,
  kTrailingBytes,
  kSizeOverflow,
  kLabelRange,
  kGzip,
};

class IdxError : public std::runtime_error {
 public:
  IdxError(IdxErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  IdxErrorKind kind() const { return kind_; }

 private:
  IdxErrorKind kind_;
};

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image

  std::size_t image_size() const { return std::size_t{rows} * cols; }
  friend bool operator==(const IdxImages&, const IdxImages&) = default;
};

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes,
                                           int num_classes = 10);

IdxImages load_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path,
                                          int num_classes = 10);

std::vector<std::uint8_t> encode_idx_images(const IdxImages& images);
std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels);

/// Whole file, inflated when gzip-wrapped.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes);

}  // namespace dsgd
