#include "ppkde/fixedpoint.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace ppkde::fixedpoint {

namespace {

constexpr long kGuardBits = 160;

// v / 2^shift, round half away from zero, v >= 0. shift may be <= 0.
Bigint shift_round(const Bigint& v, long shift) {
    if (shift <= 0) return v << size_t(-shift);
    Bigint q, r;
    mpz_tdiv_q_2exp(q.get_mpz_t(), v.get_mpz_t(), mp_bitcnt_t(shift));
    mpz_tdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), mp_bitcnt_t(shift));
    Bigint half = Bigint(1) << size_t(shift - 1);
    if (r >= half) q += 1;
    return q;
}

// round(num / den), round half away from zero, num >= 0, den > 0
Bigint div_round(const Bigint& num, const Bigint& den) {
    Bigint q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (2 * r >= den) q += 1;
    return q;
}

// ln 2 * 2^frac, cached. Series ln 2 = sum_{i>=1} 1 / (i * 2^i).
const Bigint& ln2_fixed(long frac) {
    static std::mutex mu;
    static std::map<long, Bigint> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(frac);
    if (it != cache.end()) return it->second;
    long work = frac + 64;
    Bigint sum = 0;
    for (long i = 1; i <= work; i++) {
        Bigint term = (Bigint(1) << size_t(work - i)) / i;
        if (mpz_sgn(term.get_mpz_t()) == 0) break;
        sum += term;
    }
    return cache.emplace(frac, shift_round(sum, work - frac)).first->second;
}

// pi * 2^frac via Machin: pi = 16 atan(1/5) - 4 atan(1/239)
Bigint atan_inv_fixed(unsigned long x, long frac) {
    Bigint pow = (Bigint(1) << size_t(frac)) / x;
    Bigint sum = 0;
    unsigned long x2 = x * x;
    for (long j = 0; mpz_sgn(pow.get_mpz_t()) != 0; j++) {
        Bigint term = pow / (2 * j + 1);
        if (j % 2 == 0)
            sum += term;
        else
            sum -= term;
        pow /= x2;
    }
    return sum;
}

const Bigint& pi_fixed(long frac) {
    static std::mutex mu;
    static std::map<long, Bigint> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(frac);
    if (it != cache.end()) return it->second;
    long work = frac + 64;
    Bigint pi = 16 * atan_inv_fixed(5, work) - 4 * atan_inv_fixed(239, work);
    return cache.emplace(frac, shift_round(pi, work - frac)).first->second;
}

// Exact dyadic decomposition of a positive double: d = mant * 2^exp2
// with mant a 53-bit odd-or-even integer.
struct Dyadic {
    int64_t mant;
    long exp2;
};

Dyadic dyadic_of(double d) {
    if (!(d > 0) || !std::isfinite(d)) throw ParamError("expected a positive finite double");
    int e = 0;
    double m = std::frexp(d, &e);
    return Dyadic{int64_t(std::ldexp(m, 53)), long(e) - 53};
}

// e^r as 2^work-scaled fixed point, |r_fixed| <= ln2/2 * 2^work.
Bigint exp_series(const Bigint& r_fixed, long work) {
    Bigint one = Bigint(1) << size_t(work);
    Bigint sum = one;
    Bigint term = one;
    for (long i = 1;; i++) {
        term = term * r_fixed;
        mpz_tdiv_q_2exp(term.get_mpz_t(), term.get_mpz_t(), mp_bitcnt_t(work));
        term /= i;
        if (mpz_sgn(term.get_mpz_t()) == 0) break;
        sum += term;
    }
    return sum;
}

Bigint exp_fixed_at(const Bigint& x_num, long x_frac_bits, bool negative, long out_frac_bits,
                    long work) {
    // rescale x to `work` fractional bits
    Bigint x = shift_round(x_num, x_frac_bits - work);
    if (negative) x = -x;
    const Bigint& ln2 = ln2_fixed(work);
    // k = nearest integer to x / ln2; r = x - k ln2 in [-ln2/2, ln2/2]
    Bigint k, r;
    mpz_fdiv_qr(k.get_mpz_t(), r.get_mpz_t(), x.get_mpz_t(), ln2.get_mpz_t());
    if (2 * r > ln2) {
        k += 1;
        r -= ln2;
    }
    if (!k.fits_slong_p()) throw ParamError("exp_fixed: exponent out of range");
    Bigint er = exp_series(r, work);
    long shift = work - out_frac_bits - k.get_si();
    return shift_round(er, shift);
}

long integer_exponent_estimate(const Bigint& x_num, long x_frac_bits) {
    long bits = long(mpz_sizeinbase(x_num.get_mpz_t(), 2)) - x_frac_bits;
    if (bits < 0) bits = 0;
    if (bits > 32) throw ParamError("exp_fixed: exponent too large");
    // x < 2^bits, so e^x < 2^(1.45 * 2^bits)
    return long(double(int64_t(1) << bits) * 1.4427) + 2;
}

}  // namespace

Bigint exp_fixed(const Bigint& x_num, long x_frac_bits, bool negative, long out_frac_bits) {
    if (mpz_sgn(x_num.get_mpz_t()) < 0) throw ParamError("exp_fixed: x must be >= 0");
    long work = out_frac_bits + kGuardBits;
    if (!negative) {
        // positive exponents shift the series result left; working
        // precision must cover the integer part or the shift amplifies
        // truncation error
        work += integer_exponent_estimate(x_num, x_frac_bits);
    }
    return exp_fixed_at(x_num, x_frac_bits, negative, out_frac_bits, work);
}

FixedPointParams FixedPointParams::defaults(int dims, int classes) {
    FixedPointParams p;
    p.dims = dims;
    p.classes = classes;
    p.mask_bound = p.max_sq_dist();
    return p;
}

Bigint FixedPointParams::feature_scale() const { return Bigint(1) << size_t(feature_bits); }

Bigint FixedPointParams::max_sq_dist() const {
    return Bigint(dims) * (Bigint(1) << size_t(2 * feature_bits));
}

namespace {

// 2 sigma^2 S^2 as an exact dyadic: mant^2 * 2^exp
struct KernelDenominator {
    Bigint mant_sq;
    long exp2;
};

KernelDenominator kernel_denominator(const FixedPointParams& p) {
    Dyadic s = dyadic_of(p.sigma);
    return KernelDenominator{Bigint(s.mant) * Bigint(s.mant), 2 * s.exp2 + 1 + 2 * p.feature_bits};
}

// t / (2 sigma^2 S^2) as `frac`-bit fixed point, rounded
Bigint kernel_exponent_fixed(const Bigint& t, const FixedPointParams& p, long frac) {
    KernelDenominator d = kernel_denominator(p);
    long shift = frac - d.exp2;
    Bigint num = t;
    if (shift >= 0)
        num <<= size_t(shift);
    else
        return div_round(shift_round(num, -shift), d.mant_sq);
    return div_round(num, d.mant_sq);
}

}  // namespace

long FixedPointParams::masked_exponent_bits() const {
    if (dims <= 0) throw ParamError("dims must be positive");
    Bigint range = max_sq_dist() + mask_bound;
    // ceil(range / (2 sigma^2 S^2) * log2 e), conservatively rounded up
    long prec = 192;
    Bigint x = kernel_exponent_fixed(range, *this, prec) + 1;
    // log2 e * 2^prec, rounded up
    Bigint log2e = div_round((Bigint(1) << size_t(2 * prec)), ln2_fixed(prec)) + 1;
    Bigint prod = x * log2e;  // 2*prec fractional bits
    Bigint bits;
    mpz_cdiv_q_2exp(bits.get_mpz_t(), prod.get_mpz_t(), mp_bitcnt_t(2 * prec));
    return long(bits.get_si());
}

Bigint FixedPointParams::max_sum_bound() const {
    Bigint xb_num = mask_bound;
    long prec = 64;
    Bigint x = kernel_exponent_fixed(xb_num, *this, prec);
    // ceil(e^(B / (2 sigma^2 S^2))), overestimate is fine
    Bigint e_fixed = exp_fixed(x, prec, false, 8);
    Bigint ceil_e = (e_fixed >> 8) + 2;
    return Bigint(max_tuples) * (Bigint(1) << size_t(kernel_frac_bits + correction_frac_bits)) *
           ceil_e;
}

void FixedPointParams::validate(const Bigint& modulus) const {
    if (dims <= 0 || classes < 1) throw ParamError("dims/classes must be positive");
    if (feature_bits < 1 || kernel_frac_bits < 1 || correction_frac_bits < 1)
        throw ParamError("scale bits must be positive");
    if (!(sigma > 0)) throw ParamError("sigma must be positive");
    if (max_tuples < 1) throw ParamError("max_tuples must be positive");
    if (mpz_sgn(mask_bound.get_mpz_t()) <= 0) throw ParamError("mask_bound must be positive");
    long need = masked_exponent_bits() + 64;
    if (kernel_frac_bits < need)
        throw ParamError("kernel_frac_bits too small for the masked exponent range: need " +
                         std::to_string(need));
    Bigint lhs = max_sum_bound() << size_t(gc_stat_bits);
    if (!(2 * lhs < modulus))
        throw ParamError("modulus too small: class-score sums plus masks would wrap");
}

Bytes FixedPointParams::serialize() const {
    ByteWriter w;
    w.u32(uint32_t(feature_bits));
    w.u32(uint32_t(kernel_frac_bits));
    w.u32(uint32_t(correction_frac_bits));
    w.u32(uint32_t(gc_stat_bits));
    w.u32(uint32_t(dims));
    w.u32(uint32_t(classes));
    w.u64(uint64_t(max_tuples));
    Dyadic s = dyadic_of(sigma);
    w.u64(uint64_t(s.mant));
    w.u64(uint64_t(int64_t(s.exp2)));
    w.bigint(mask_bound);
    return w.take();
}

FixedPointParams FixedPointParams::deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    FixedPointParams p;
    p.feature_bits = int(r.u32());
    p.kernel_frac_bits = int(r.u32());
    p.correction_frac_bits = int(r.u32());
    p.gc_stat_bits = int(r.u32());
    p.dims = int(r.u32());
    p.classes = int(r.u32());
    p.max_tuples = long(r.u64());
    int64_t mant = int64_t(r.u64());
    long exp2 = long(int64_t(r.u64()));
    p.sigma = std::ldexp(double(mant), int(exp2));
    p.mask_bound = r.bigint();
    return p;
}

int64_t quantize_feature(double x, int feature_bits) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("feature outside [0, 1]");
    return std::llround(std::ldexp(x, feature_bits));
}

Bigint quantize_kernel(double g, int frac_bits) {
    Dyadic d = dyadic_of(g);
    return shift_round(Bigint(d.mant), -(d.exp2 + frac_bits));
}

namespace {

// 1/(sigma sqrt(2 pi)) * 2^frac
Bigint gaussian_peak_fixed(double sigma, long frac) {
    long work = frac + 64;
    // sqrt(2 pi) * 2^work = isqrt(2 pi * 2^(2 work))
    Bigint arg = pi_fixed(work) << size_t(work + 1);
    Bigint s2pi;
    mpz_sqrt(s2pi.get_mpz_t(), arg.get_mpz_t());
    Dyadic s = dyadic_of(sigma);
    // 2^(frac + work - s.exp2) / (mant * sqrt2pi_fixed)
    long top = frac + work - s.exp2;
    if (top <= 0) throw ParamError("sigma too large for peak computation");
    return div_round(Bigint(1) << size_t(top), Bigint(s.mant) * s2pi);
}

}  // namespace

Bigint gaussian_kernel_quantized(const Bigint& t, const FixedPointParams& params) {
    if (mpz_sgn(t.get_mpz_t()) < 0) throw std::domain_error("squared distance must be >= 0");
    long work = params.kernel_frac_bits + kGuardBits;
    Bigint x = kernel_exponent_fixed(t, params, work);
    Bigint e = exp_fixed_at(x, work, true, work, work);
    Bigint peak = gaussian_peak_fixed(params.sigma, work);
    return shift_round(peak * e, 2 * work - params.kernel_frac_bits);
}

Bigint correction_factor(const Bigint& mu, const FixedPointParams& params) {
    if (mpz_sgn(mu.get_mpz_t()) < 0 || mu >= params.mask_bound)
        throw std::domain_error("mask outside [0, mask_bound)");
    long prec = 192;
    Bigint x = kernel_exponent_fixed(mu, params, prec);
    return exp_fixed(x, prec, false, params.correction_frac_bits);
}

}  // namespace ppkde::fixedpoint
