#include "ppkde/rng.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace ppkde {

uint64_t RandomSource::next_u64() {
    uint8_t b[8];
    fill(b, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v = (v << 8) | b[i];
    return v;
}

Bigint RandomSource::uniform_bits(size_t bits) {
    if (bits == 0) return 0;
    size_t nbytes = (bits + 7) / 8;
    Bytes b(nbytes);
    fill(b.data(), nbytes);
    // drop excess high bits
    size_t excess = nbytes * 8 - bits;
    b[0] &= uint8_t(0xff >> excess);
    return bigint_from_bytes(b);
}

Bigint RandomSource::uniform_below(const Bigint& bound) {
    if (mpz_sgn(bound.get_mpz_t()) <= 0) throw std::invalid_argument("uniform_below: bound <= 0");
    size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    while (true) {
        Bigint v = uniform_bits(bits);
        if (v < bound) return v;
    }
}

double RandomSource::uniform_unit() {
    return double(next_u64() >> 11) * 0x1p-53;
}

Bigint RandomSource::uniform_unit_mod(const Bigint& n) {
    while (true) {
        Bigint r = uniform_below(n);
        if (mpz_sgn(r.get_mpz_t()) == 0) continue;
        Bigint g;
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
        if (g == 1) return r;
    }
}

SystemRandom::SystemRandom() = default;

void SystemRandom::refill() {
    FILE* f = std::fopen("/dev/urandom", "rb");
    if (!f) throw std::runtime_error("cannot open /dev/urandom");
    size_t got = std::fread(buf_.data(), 1, buf_.size(), f);
    std::fclose(f);
    if (got != buf_.size()) throw std::runtime_error("short read from /dev/urandom");
    avail_ = buf_.size();
}

void SystemRandom::fill(uint8_t* out, size_t len) {
    while (len > 0) {
        if (avail_ == 0) refill();
        size_t take = std::min(len, avail_);
        std::memcpy(out, buf_.data() + (buf_.size() - avail_), take);
        avail_ -= take;
        out += take;
        len -= take;
    }
}

void SeededRandom::fill(uint8_t* out, size_t len) {
    while (len >= 8) {
        uint64_t v = gen_();
        for (int i = 0; i < 8; i++) out[i] = uint8_t(v >> (8 * i));
        out += 8;
        len -= 8;
    }
    if (len > 0) {
        uint64_t v = gen_();
        for (size_t i = 0; i < len; i++) out[i] = uint8_t(v >> (8 * i));
    }
}

SeededRandom SeededRandom::derive(uint64_t seed, uint64_t tag) {
    // splitmix64 over (seed, tag) so substreams do not overlap trivially
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return SeededRandom(z ^ (z >> 31));
}

}  // namespace ppkde
