#pragma once

#include <cstdint>

#include "ppkde/bytes.hpp"

namespace ppkde::fixedpoint {

struct ParamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quantization and masking parameters tying the real-valued Gaussian
/// kernel to modular integer arithmetic.
///
///   feature scale      S  = 2^feature_bits
///   kernel scale          = 2^kernel_frac_bits
///   correction scale      = 2^correction_frac_bits
///   squared distances     lie in [0, dims * S^2]
///   distance masks mu     drawn uniformly from [0, mask_bound)
///
/// Masked kernel values are later unmasked by multiplying with
/// correction_factor(mu), so kernel_frac_bits must absorb the full
/// masked exponent range with 64 bits of relative precision to spare.
struct FixedPointParams {
    int feature_bits = 12;         // s
    int kernel_frac_bits = 1024;   // F
    int correction_frac_bits = 1024;  // F'
    int gc_stat_bits = 40;         // lambda_gc
    int dims = 0;                  // m
    int classes = 0;               // c
    long max_tuples = 1 << 16;     // n_max
    double sigma = 0.25;
    Bigint mask_bound;             // B; defaults to dims * S^2

    static FixedPointParams defaults(int dims, int classes);

    Bigint feature_scale() const;            // 2^s
    Bigint max_sq_dist() const;              // D_max = dims * S^2
    /// ceil(((D_max + B) / (2 sigma^2 S^2)) * log2 e): bits consumed by
    /// the deepest masked kernel value.
    long masked_exponent_bits() const;
    /// Upper bound on any class-score sum: n_max * 2^(F+F') * ceil(e^(B/(2 sigma^2 S^2))).
    Bigint max_sum_bound() const;

    /// Checks the three construction assertions against a Paillier
    /// modulus; throws ParamError on violation.
    void validate(const Bigint& modulus) const;

    Bytes serialize() const;
    static FixedPointParams deserialize(std::span<const uint8_t> bytes);
};

/// round(x * 2^feature_bits), x in [0, 1]. Half-away-from-zero.
int64_t quantize_feature(double x, int feature_bits);

/// round(g * 2^frac_bits) for a machine-double kernel value g > 0.
/// Exact given the double's bits.
Bigint quantize_kernel(double g, int frac_bits);

/// round(K~(t) * 2^F) where K~(t) = (1/(sigma sqrt(2 pi))) e^(-t / (2 sigma^2 S^2)).
/// Integer-only extended-precision evaluation; no doubles, so deep
/// underflow regions (e^-700 and beyond) keep full relative precision.
Bigint gaussian_kernel_quantized(const Bigint& t, const FixedPointParams& params);

/// round(e^(mu / (2 sigma^2 S^2)) * 2^F'), the Alg-3 unmasking factor.
Bigint correction_factor(const Bigint& mu, const FixedPointParams& params);

/// round(e^(sign * x) * 2^out_frac_bits) with x = x_num / 2^x_frac_bits >= 0.
/// Argument reduction by ln 2 plus Taylor series, all in integer
/// arithmetic with 160 guard bits.
Bigint exp_fixed(const Bigint& x_num, long x_frac_bits, bool negative, long out_frac_bits);

}  // namespace ppkde::fixedpoint
