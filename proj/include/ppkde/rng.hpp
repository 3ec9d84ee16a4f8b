#pragma once

#include <cstdint>
#include <memory>
#include <random>

#include "ppkde/bytes.hpp"

namespace ppkde {

/// Byte-oriented randomness source. All sampling helpers are built on
/// fill() so that a seeded source reproduces identical values on every
/// platform.
class RandomSource {
  public:
    virtual ~RandomSource() = default;
    virtual void fill(uint8_t* out, size_t len) = 0;

    uint64_t next_u64();
    /// Uniform in [0, bound) by rejection sampling. bound > 0.
    Bigint uniform_below(const Bigint& bound);
    /// Uniform nonnegative integer with exactly `bits` random bits.
    Bigint uniform_bits(size_t bits);
    /// Uniform unit u in [0, 1) with 53 random bits.
    double uniform_unit();
    /// Uniform in [1, n) with gcd(r, n) = 1.
    Bigint uniform_unit_mod(const Bigint& n);
};

/// Reads /dev/urandom; buffered. Suitable for key generation.
class SystemRandom final : public RandomSource {
  public:
    SystemRandom();
    void fill(uint8_t* out, size_t len) override;

  private:
    void refill();
    std::array<uint8_t, 4096> buf_;
    size_t avail_ = 0;
};

/// Deterministic stream for tests and reproduction runs. Not a CSPRNG.
class SeededRandom final : public RandomSource {
  public:
    explicit SeededRandom(uint64_t seed) : gen_(seed) {}
    void fill(uint8_t* out, size_t len) override;

    /// Independent substream; stable derivation from (seed, tag).
    static SeededRandom derive(uint64_t seed, uint64_t tag);

  private:
    std::mt19937_64 gen_;
};

}  // namespace ppkde
