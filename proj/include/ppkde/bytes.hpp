#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ppkde {

using Bigint = mpz_class;
using Bytes = std::vector<uint8_t>;

struct SerializationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Append-only encoder for the project wire format: every field is a
/// 4-byte big-endian length followed by that many bytes. Big integers
/// are big-endian magnitude bytes, minimal length (empty for zero)
/// unless a fixed width is requested.
class ByteWriter {
  public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v);
    void u64(uint64_t v);
    void blob(std::span<const uint8_t> bytes);
    void bigint(const Bigint& x);
    void bigint_padded(const Bigint& x, size_t width);

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

  private:
    Bytes buf_;
};

/// Matching decoder. Throws SerializationError on truncation.
class ByteReader {
  public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8();
    uint32_t u32();
    uint64_t u64();
    Bytes blob();
    Bigint bigint();

    bool done() const { return pos_ == data_.size(); }
    size_t remaining() const { return data_.size() - pos_; }

  private:
    void need(size_t n) const;
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

Bytes bigint_to_bytes(const Bigint& x);
Bytes bigint_to_bytes_padded(const Bigint& x, size_t width);
Bigint bigint_from_bytes(std::span<const uint8_t> bytes);

/// Non-cryptographic 64-bit fingerprint (FNV-1a), used to bind
/// ciphertexts to the key they were produced under.
uint64_t fnv1a64(std::span<const uint8_t> bytes);

}  // namespace ppkde
