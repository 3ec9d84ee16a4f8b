#include "ppkde/paillier.hpp"

namespace ppkde::paillier {

namespace {

constexpr int kMinKeyBits = 1024;
constexpr uint8_t kTagPublicKey = 0x50;   // 'P'
constexpr uint8_t kTagSecretKey = 0x53;   // 'S'
constexpr uint8_t kTagCiphertext = 0x43;  // 'C'

Bigint powm(const Bigint& base, const Bigint& exp, const Bigint& mod) {
    Bigint out;
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return out;
}

Bigint invert(const Bigint& x, const Bigint& mod) {
    Bigint out;
    if (!mpz_invert(out.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t()))
        throw KeyError("value not invertible");
    return out;
}

// L(u) = (u - 1) / n, defined on u = 1 mod n
Bigint l_function(const Bigint& u, const Bigint& n) {
    Bigint t = u - 1;
    return t / n;
}

Bigint random_prime(int bits, RandomSource& rng) {
    while (true) {
        Bigint cand = rng.uniform_bits(size_t(bits));
        // force exact bit length and a set second bit so the product of
        // two such primes has exactly 2*bits bits
        mpz_setbit(cand.get_mpz_t(), mp_bitcnt_t(bits - 1));
        mpz_setbit(cand.get_mpz_t(), mp_bitcnt_t(bits - 2));
        mpz_setbit(cand.get_mpz_t(), 0);
        if (mpz_probab_prime_p(cand.get_mpz_t(), 30) > 0) return cand;
    }
}

}  // namespace

PublicKey PublicKey::from_modulus(const Bigint& n, int key_bits) {
    PublicKey pk;
    pk.n = n;
    pk.g = n + 1;
    pk.key_bits = key_bits;
    pk.n_squared = n * n;
    pk.key_id = fnv1a64(bigint_to_bytes(n));
    return pk;
}

Bigint PublicKey::encode_signed(const Bigint& x) const {
    Bigint v = x % n;
    if (mpz_sgn(v.get_mpz_t()) < 0) v += n;
    return v;
}

Bigint PublicKey::decode_signed(const Bigint& v) const {
    if (v * 2 >= n) return v - n;
    return v;
}

Bytes PublicKey::serialize() const {
    ByteWriter w;
    w.u8(kTagPublicKey);
    w.bigint(n);
    w.bigint(Bigint(key_bits));
    return w.take();
}

PublicKey PublicKey::deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.u8() != kTagPublicKey) throw SerializationError("bad public key tag");
    Bigint n = r.bigint();
    int bits = int(r.bigint().get_ui());
    return from_modulus(n, bits);
}

Bytes SecretKey::serialize() const {
    ByteWriter w;
    w.u8(kTagSecretKey);
    w.bigint(pk.n);
    w.bigint(Bigint(pk.key_bits));
    w.bigint(p);
    w.bigint(q);
    return w.take();
}

namespace {

SecretKey make_secret_key(const PublicKey& pk, const Bigint& p, const Bigint& q) {
    SecretKey sk;
    sk.pk = pk;
    sk.p = p;
    sk.q = q;
    Bigint pm1 = p - 1, qm1 = q - 1;
    mpz_lcm(sk.lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    sk.mu = invert(l_function(powm(pk.g, sk.lambda, pk.n_squared), pk.n), pk.n);
    sk.p_squared = p * p;
    sk.q_squared = q * q;
    sk.hp = invert(Bigint((powm(pk.g % sk.p_squared, pm1, sk.p_squared) - 1) / p % p), p);
    sk.hq = invert(Bigint((powm(pk.g % sk.q_squared, qm1, sk.q_squared) - 1) / q % q), q);
    sk.q_inv_p = invert(q, p);
    return sk;
}

}  // namespace

SecretKey SecretKey::deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.u8() != kTagSecretKey) throw SerializationError("bad secret key tag");
    Bigint n = r.bigint();
    int bits = int(r.bigint().get_ui());
    Bigint p = r.bigint();
    Bigint q = r.bigint();
    return make_secret_key(PublicKey::from_modulus(n, bits), p, q);
}

Bytes Ciphertext::serialize(const PublicKey& pk) const {
    // Fixed width: exactly twice the modulus length, so ciphertext size
    // is deterministic on the wire.
    ByteWriter w;
    w.u8(kTagCiphertext);
    w.u64(key_id);
    w.bigint_padded(value, 2 * pk.modulus_bytes());
    return w.take();
}

Ciphertext Ciphertext::deserialize(std::span<const uint8_t> bytes, const PublicKey& pk) {
    ByteReader r(bytes);
    if (r.u8() != kTagCiphertext) throw SerializationError("bad ciphertext tag");
    Ciphertext c;
    c.key_id = r.u64();
    c.value = r.bigint();
    if (c.key_id != pk.key_id) throw KeyError("ciphertext bound to a different key");
    if (c.value >= pk.n_squared) throw SerializationError("ciphertext out of range");
    return c;
}

std::pair<PublicKey, SecretKey> keygen(int key_bits, RandomSource& rng) {
    if (key_bits < kMinKeyBits || key_bits % 2 != 0)
        throw KeyError("key_bits must be even and >= 1024");
    while (true) {
        Bigint p = random_prime(key_bits / 2, rng);
        Bigint q = random_prime(key_bits / 2, rng);
        if (p == q) continue;
        Bigint n = p * q;
        if (int(mpz_sizeinbase(n.get_mpz_t(), 2)) != key_bits) continue;
        Bigint pq = (p - 1) * (q - 1), gcd;
        mpz_gcd(gcd.get_mpz_t(), n.get_mpz_t(), pq.get_mpz_t());
        if (gcd != 1) continue;
        PublicKey pk = PublicKey::from_modulus(n, key_bits);
        return {pk, make_secret_key(pk, p, q)};
    }
}

namespace {

void check_plaintext(const PublicKey& pk, const Bigint& m) {
    if (mpz_sgn(m.get_mpz_t()) < 0 || m >= pk.n)
        throw std::domain_error("plaintext out of [0, n)");
}

Ciphertext assemble(const PublicKey& pk, const Bigint& m, const Bigint& rn) {
    // (1 + m*n) * r^n mod n^2
    Bigint c = (1 + m * pk.n) % pk.n_squared;
    c = c * rn % pk.n_squared;
    return Ciphertext{c, pk.key_id};
}

}  // namespace

Ciphertext encrypt(const PublicKey& pk, const Bigint& m, RandomSource& rng) {
    check_plaintext(pk, m);
    Bigint r = rng.uniform_unit_mod(pk.n);
    return assemble(pk, m, powm(r, pk.n, pk.n_squared));
}

Ciphertext encrypt_with_secret(const SecretKey& sk, const Bigint& m, RandomSource& rng) {
    const PublicKey& pk = sk.pk;
    check_plaintext(pk, m);
    Bigint r = rng.uniform_unit_mod(pk.n);
    // r^n mod n^2 via CRT over p^2, q^2
    Bigint ep = pk.n % (sk.p_squared - sk.p);
    Bigint eq = pk.n % (sk.q_squared - sk.q);
    Bigint ap = powm(r % sk.p_squared, ep, sk.p_squared);
    Bigint aq = powm(r % sk.q_squared, eq, sk.q_squared);
    // combine mod p^2 * q^2 = n^2
    Bigint q2_inv_p2 = invert(sk.q_squared % sk.p_squared, sk.p_squared);
    Bigint t = (ap - aq) % sk.p_squared;
    if (mpz_sgn(t.get_mpz_t()) < 0) t += sk.p_squared;
    t = t * q2_inv_p2 % sk.p_squared;
    Bigint rn = (aq + t * sk.q_squared) % pk.n_squared;
    return assemble(pk, m, rn);
}

Bigint decrypt(const SecretKey& sk, const Ciphertext& c) {
    if (c.key_id != sk.pk.key_id) throw KeyError("ciphertext bound to a different key");
    // unit mod n^2 iff coprime to n, which is the cheaper test
    Bigint gcd;
    mpz_gcd(gcd.get_mpz_t(), c.value.get_mpz_t(), sk.pk.n.get_mpz_t());
    if (mpz_sgn(c.value.get_mpz_t()) == 0 || gcd != 1)
        throw std::domain_error("ciphertext is not a unit mod n^2");
    // CRT: m_p = L_p(c^(p-1) mod p^2) * hp mod p, same for q
    Bigint mp = (powm(c.value % sk.p_squared, sk.p - 1, sk.p_squared) - 1) / sk.p % sk.p;
    mp = mp * sk.hp % sk.p;
    Bigint mq = (powm(c.value % sk.q_squared, sk.q - 1, sk.q_squared) - 1) / sk.q % sk.q;
    mq = mq * sk.hq % sk.q;
    Bigint t = (mp - mq) % sk.p;
    if (mpz_sgn(t.get_mpz_t()) < 0) t += sk.p;
    t = t * sk.q_inv_p % sk.p;
    return (mq + t * sk.q) % sk.pk.n;
}

namespace {

void check_same_key(const Ciphertext& a, const Ciphertext& b) {
    if (a.key_id != b.key_id) throw KeyError("ciphertexts under different keys");
}

}  // namespace

Ciphertext hom_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
    check_same_key(a, b);
    if (a.key_id != pk.key_id) throw KeyError("ciphertext bound to a different key");
    return Ciphertext{a.value * b.value % pk.n_squared, pk.key_id};
}

Ciphertext hom_scale(const PublicKey& pk, const Ciphertext& c, const Bigint& k) {
    if (c.key_id != pk.key_id) throw KeyError("ciphertext bound to a different key");
    Bigint base = c.value;
    Bigint e = k;
    if (mpz_sgn(e.get_mpz_t()) < 0) {
        base = invert(base, pk.n_squared);
        e = -e;
    }
    e %= pk.n;
    return Ciphertext{powm(base, e, pk.n_squared), pk.key_id};
}

Ciphertext hom_neg(const PublicKey& pk, const Ciphertext& c) {
    if (c.key_id != pk.key_id) throw KeyError("ciphertext bound to a different key");
    return Ciphertext{invert(c.value, pk.n_squared), pk.key_id};
}

}  // namespace ppkde::paillier
