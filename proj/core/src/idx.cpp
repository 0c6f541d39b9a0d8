// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "dsgd/idx.hpp"

#include <zlib.h>

#include <fstream>
#include <limits>
#include <sstream>

namespace dsgd {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

void check_header(std::span<const std::uint8_t> bytes, std::uint32_t magic,
                  std::size_t header_len) {
  if (bytes.size() < 4) throw IdxError(IdxErrorKind::kTruncated, "IDX: file shorter than magic");
  const std::uint32_t got = read_be32(bytes, 0);
  if (got != magic) {
    throw IdxError(IdxErrorKind::kWrongMagic,
                   "IDX: wrong magic " + hex32(got) + ", expected " + hex32(magic));
  }
  if (bytes.size() < header_len) throw IdxError(IdxErrorKind::kTruncated, "IDX: truncated header");
}

void check_payload(std::span<const std::uint8_t> bytes, std::size_t header_len,
                   std::uint64_t payload) {
  const std::uint64_t available = bytes.size() - header_len;
  if (available < payload) {
    throw IdxError(IdxErrorKind::kTruncated, "IDX: payload truncated (" +
                                                 std::to_string(available) + " of " +
                                                 std::to_string(payload) + " bytes)");
  }
  if (available > payload) {
    throw IdxError(IdxErrorKind::kTrailingBytes,
                   "IDX: " + std::to_string(available - payload) + " trailing bytes");
  }
}

bool is_gzip(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> in) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
    throw IdxError(IdxErrorKind::kGzip, "gzip: inflateInit2 failed");
  }
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> chunk(1 << 16);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  int ret = Z_OK;
  while (ret != Z_STREAM_END) {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      inflateEnd(&zs);
      throw IdxError(IdxErrorKind::kGzip, "gzip: corrupt stream");
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
    if (ret == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw IdxError(IdxErrorKind::kGzip, "gzip: unexpected end of stream");
    }
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeader = 16;
  check_header(bytes, kIdxImagesMagic, kHeader);
  IdxImages out;
  out.count = read_be32(bytes, 4);
  out.rows = read_be32(bytes, 8);
  out.cols = read_be32(bytes, 12);

  std::uint64_t payload = 0;
  const std::uint64_t per_image = std::uint64_t{out.rows} * out.cols;
  if (per_image != 0 && out.count > std::numeric_limits<std::uint64_t>::max() / per_image) {
    throw IdxError(IdxErrorKind::kSizeOverflow, "IDX: count*rows*cols overflows");
  }
  payload = per_image * out.count;
  if (payload > std::numeric_limits<std::size_t>::max() - kHeader) {
    throw IdxError(IdxErrorKind::kSizeOverflow, "IDX: payload size overflows");
  }
  check_payload(bytes, kHeader, payload);
  out.pixels.assign(bytes.begin() + kHeader, bytes.end());
  return out;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes, int num_classes) {
  constexpr std::size_t kHeader = 8;
  check_header(bytes, kIdxLabelsMagic, kHeader);
  const std::uint32_t count = read_be32(bytes, 4);
  check_payload(bytes, kHeader, count);
  std::vector<std::uint8_t> labels(bytes.begin() + kHeader, bytes.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) {
      throw IdxError(IdxErrorKind::kLabelRange,
                     "IDX: label " + std::to_string(labels[i]) + " at index " +
                         std::to_string(i) + " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
  return labels;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IdxError(IdxErrorKind::kIo, "read failed: " + path.string());
  if (is_gzip(bytes)) return gunzip(bytes);
  return bytes;
}

IdxImages load_idx_images(const std::filesystem::path& path) {
  return parse_idx_images(read_file_bytes(path));
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path, int num_classes) {
  return parse_idx_labels(read_file_bytes(path), num_classes);
}

std::vector<std::uint8_t> encode_idx_images(const IdxImages& images) {
  if (images.pixels.size() != std::size_t{images.count} * images.image_size()) {
    throw std::invalid_argument("encode_idx_images: pixel count does not match dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  write_be32(out, kIdxImagesMagic);
  write_be32(out, images.count);
  write_be32(out, images.rows);
  write_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels) {
  if (labels.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("encode_idx_labels: too many labels");
  }
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  write_be32(out, kIdxLabelsMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw IdxError(IdxErrorKind::kGzip, "gzip: deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(bytes.size())) + 32);
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int ret = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (ret != Z_STREAM_END) throw IdxError(IdxErrorKind::kGzip, "gzip: deflate failed");
  out.resize(zs.total_out);
  return out;
}

}  // namespace dsgd
