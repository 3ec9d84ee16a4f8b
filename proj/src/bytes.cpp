#include "ppkde/bytes.hpp"

namespace ppkde {

void ByteWriter::u32(uint32_t v) {
    buf_.push_back(uint8_t(v >> 24));
    buf_.push_back(uint8_t(v >> 16));
    buf_.push_back(uint8_t(v >> 8));
    buf_.push_back(uint8_t(v));
}

void ByteWriter::u64(uint64_t v) {
    u32(uint32_t(v >> 32));
    u32(uint32_t(v));
}

void ByteWriter::blob(std::span<const uint8_t> bytes) {
    u32(uint32_t(bytes.size()));
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::bigint(const Bigint& x) { blob(bigint_to_bytes(x)); }

void ByteWriter::bigint_padded(const Bigint& x, size_t width) {
    blob(bigint_to_bytes_padded(x, width));
}

void ByteReader::need(size_t n) const {
    if (pos_ + n > data_.size()) throw SerializationError("truncated message");
}

uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

uint32_t ByteReader::u32() {
    need(4);
    uint32_t v = (uint32_t(data_[pos_]) << 24) | (uint32_t(data_[pos_ + 1]) << 16) |
                 (uint32_t(data_[pos_ + 2]) << 8) | uint32_t(data_[pos_ + 3]);
    pos_ += 4;
    return v;
}

uint64_t ByteReader::u64() {
    uint64_t hi = u32();
    return (hi << 32) | u32();
}

Bytes ByteReader::blob() {
    uint32_t len = u32();
    need(len);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + len);
    pos_ += len;
    return out;
}

Bigint ByteReader::bigint() { return bigint_from_bytes(blob()); }

Bytes bigint_to_bytes(const Bigint& x) {
    if (mpz_sgn(x.get_mpz_t()) < 0)
        throw SerializationError("negative big integer not serializable");
    size_t count = 0;
    if (mpz_sgn(x.get_mpz_t()) == 0) return {};
    Bytes out((mpz_sizeinbase(x.get_mpz_t(), 2) + 7) / 8);
    mpz_export(out.data(), &count, 1, 1, 1, 0, x.get_mpz_t());
    out.resize(count);
    return out;
}

Bytes bigint_to_bytes_padded(const Bigint& x, size_t width) {
    Bytes minimal = bigint_to_bytes(x);
    if (minimal.size() > width) throw SerializationError("value wider than pad width");
    Bytes out(width - minimal.size(), 0);
    out.insert(out.end(), minimal.begin(), minimal.end());
    return out;
}

Bigint bigint_from_bytes(std::span<const uint8_t> bytes) {
    Bigint x;
    if (!bytes.empty()) mpz_import(x.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
    return x;
}

uint64_t fnv1a64(std::span<const uint8_t> bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace ppkde
