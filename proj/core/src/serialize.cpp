#include "vectormaton/serialize.hpp"

#include <bit>
#include <limits>

namespace vectormaton::io {

void ByteWriter::put_u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_varint(std::uint64_t v) {
  while (v >= 0x80) {
    buf_.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  buf_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::put_bytes(std::string_view bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::put_sorted_ids(std::span<const VectorId> ids) {
  put_varint(ids.size());
  VectorId prev = 0;
  for (VectorId id : ids) {
    put_varint(id - prev);
    prev = id;
  }
}

void ByteReader::need(std::size_t n, const char* what) const {
  if (data_.size() - pos_ < n) {
    throw FormatError(std::string("truncated input reading ") + what + " at byte " +
                      std::to_string(pos_));
  }
}

std::uint8_t ByteReader::get_u8() {
  need(1, "u8");
  return data_[pos_++];
}

std::uint32_t ByteReader::get_u32() {
  need(4, "u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t ByteReader::get_u64() {
  need(8, "u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
  return v;
}

float ByteReader::get_f32() { return std::bit_cast<float>(get_u32()); }

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

std::uint64_t ByteReader::get_varint() {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    need(1, "varint");
    const std::uint8_t byte = data_[pos_++];
    v |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
    if ((byte & 0x80) == 0) return v;
  }
  throw FormatError("varint overflow at byte " + std::to_string(pos_));
}

std::string ByteReader::get_bytes(std::size_t n) {
  need(n, "bytes");
  std::string out(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return out;
}

std::vector<VectorId> ByteReader::get_sorted_ids() {
  const std::uint64_t count = get_varint();
  if (count > data_.size() - pos_) {
    throw FormatError("id list length " + std::to_string(count) + " exceeds input at byte " +
                      std::to_string(pos_));
  }
  std::vector<VectorId> ids;
  ids.reserve(count);
  std::uint64_t prev = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t delta = get_varint();
    if (delta == 0 || prev + delta > std::numeric_limits<VectorId>::max()) {
      throw FormatError("invalid id delta at byte " + std::to_string(pos_));
    }
    prev += delta;
    ids.push_back(static_cast<VectorId>(prev));
  }
  return ids;
}

}  // namespace vectormaton::io
