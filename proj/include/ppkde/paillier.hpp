#pragma once

#include <utility>

#include "ppkde/bytes.hpp"
#include "ppkde/rng.hpp"

namespace ppkde::paillier {

struct KeyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Public half of a Paillier key pair. g is fixed to n + 1, so
/// encryption needs one modular multiplication plus the randomizer
/// power.
struct PublicKey {
    Bigint n;
    Bigint g;
    int key_bits = 0;

    Bigint n_squared;
    uint64_t key_id = 0;

    static PublicKey from_modulus(const Bigint& n, int key_bits);

    size_t modulus_bytes() const { return size_t(key_bits + 7) / 8; }

    /// Signed encoding: x in (-n/2, n/2] maps to x mod n.
    Bigint encode_signed(const Bigint& x) const;
    Bigint decode_signed(const Bigint& v) const;

    Bytes serialize() const;
    static PublicKey deserialize(std::span<const uint8_t> bytes);
};

struct SecretKey {
    PublicKey pk;
    Bigint p, q;
    Bigint lambda;  // lcm(p-1, q-1)
    Bigint mu;      // (L(g^lambda mod n^2))^-1 mod n

    // CRT decryption precomputation
    Bigint p_squared, q_squared;
    Bigint hp, hq;     // per-prime L-inverses
    Bigint q_inv_p;    // q^-1 mod p

    Bytes serialize() const;
    static SecretKey deserialize(std::span<const uint8_t> bytes);
};

struct Ciphertext {
    Bigint value;
    uint64_t key_id = 0;

    Bytes serialize(const PublicKey& pk) const;
    static Ciphertext deserialize(std::span<const uint8_t> bytes, const PublicKey& pk);
};

/// Balanced distinct primes of key_bits/2 bits each. key_bits must be
/// even and at least 1024. Pass a SeededRandom for reproducible test
/// keys; SystemRandom otherwise.
std::pair<PublicKey, SecretKey> keygen(int key_bits, RandomSource& rng);

Ciphertext encrypt(const PublicKey& pk, const Bigint& m, RandomSource& rng);
/// Same ciphertext distribution, but uses the prime factorization to
/// compute the randomizer power by CRT. For the key-holding party.
Ciphertext encrypt_with_secret(const SecretKey& sk, const Bigint& m, RandomSource& rng);

Bigint decrypt(const SecretKey& sk, const Ciphertext& c);

Ciphertext hom_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
/// Multiplies the plaintext by k mod n; negative k via ciphertext
/// inversion, so small |k| stays cheap.
Ciphertext hom_scale(const PublicKey& pk, const Ciphertext& c, const Bigint& k);
Ciphertext hom_neg(const PublicKey& pk, const Ciphertext& c);

}  // namespace ppkde::paillier
