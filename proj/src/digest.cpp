#include "flowrecom/digest.hpp"

#include <openssl/sha.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "flowrecom/error.hpp"

namespace flowrecom {
namespace {

std::array<std::uint8_t, SHA256_DIGEST_LENGTH> sha256_raw(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, SHA256_DIGEST_LENGTH> out{};
  SHA256(bytes.data(), bytes.size(), out.data());
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xF]);
  }
  return s;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  return to_hex(sha256_raw(bytes));
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(slurp(path)); }

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  u64(s.size());
  bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void ByteReader::need(std::size_t n) {
  if (remaining() < n) throw Error(Errc::CorruptCheckpoint, context_ + ": truncated data");
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
  const std::uint64_t n = u64();
  need(n);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

void write_sealed(const std::filesystem::path& path, std::string_view magic,
                  const std::vector<std::uint8_t>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  const auto hash = sha256_raw(payload);
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  out.write(reinterpret_cast<const char*>(hash.data()), static_cast<std::streamsize>(hash.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

std::vector<std::uint8_t> read_sealed(const std::filesystem::path& path,
                                      std::string_view magic) {
  const auto bytes = slurp(path);
  const std::size_t overhead = magic.size() + SHA256_DIGEST_LENGTH;
  if (bytes.size() < overhead ||
      std::memcmp(bytes.data(), magic.data(), magic.size()) != 0) {
    throw Error(Errc::CorruptCheckpoint, path.string() + ": bad header or truncated file");
  }
  std::vector<std::uint8_t> payload(bytes.begin() + static_cast<std::ptrdiff_t>(magic.size()),
                                    bytes.end() - SHA256_DIGEST_LENGTH);
  const auto hash = sha256_raw(payload);
  if (std::memcmp(hash.data(), bytes.data() + bytes.size() - SHA256_DIGEST_LENGTH,
                  SHA256_DIGEST_LENGTH) != 0) {
    throw Error(Errc::CorruptCheckpoint, path.string() + ": content hash mismatch");
  }
  return payload;
}

}  // namespace flowrecom
