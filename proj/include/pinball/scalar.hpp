#pragma once
#include <gmpxx.h>
#include <mpfr.h>

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "pinball/errors.hpp"

namespace pinball {

// Exact rational scalar. mpq_class keeps values canonical (lowest terms,
// positive denominator) through arithmetic; raw constructions must call
// canonicalize() before use, which rat_from_string takes care of.
using Rational = mpq_class;

Rational rat_from_string(const std::string& text);
std::string rat_to_string(const Rational& q);

// Exact square root when numerator and denominator are perfect squares.
std::optional<Rational> rational_sqrt_exact(const Rational& s);

// floor(q) as an integer-valued rational
Rational rat_floor(const Rational& q);

inline int sgn(const Rational& q) { return mpq_sgn(q.get_mpq_t()); }

// Arbitrary-precision binary float with explicit precision, round-to-nearest
// everywhere. Two operands of an operation must share one precision; scenes
// pick a single precision at load time, so mixing indicates a bug upstream.
class BigFloat {
public:
    static constexpr mpfr_prec_t min_precision = 64;

    explicit BigFloat(mpfr_prec_t prec = 256) : prec_(check_prec(prec)) {
        mpfr_init2(v_, prec_);
        mpfr_set_zero(v_, 1);
    }
    BigFloat(const Rational& q, mpfr_prec_t prec) : prec_(check_prec(prec)) {
        mpfr_init2(v_, prec_);
        mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
    }
    BigFloat(long n, mpfr_prec_t prec) : prec_(check_prec(prec)) {
        mpfr_init2(v_, prec_);
        mpfr_set_si(v_, n, MPFR_RNDN);
    }
    BigFloat(const BigFloat& o) : prec_(o.prec_) {
        mpfr_init2(v_, prec_);
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept : prec_(o.prec_) {
        mpfr_init2(v_, prec_);
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            if (prec_ != o.prec_) {
                mpfr_set_prec(v_, o.prec_);
                prec_ = o.prec_;
            }
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        mpfr_swap(v_, o.v_);
        std::swap(prec_, o.prec_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_prec_t precision() const { return prec_; }
    const mpfr_t& raw() const { return v_; }

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
        BigFloat r(a.match(b));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
        BigFloat r(a.match(b));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
        BigFloat r(a.match(b));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
        if (mpfr_zero_p(b.v_)) fail(ErrorCode::DomainError, "BigFloat division by zero");
        BigFloat r(a.match(b));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    BigFloat operator-() const {
        BigFloat r(prec_);
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }
    BigFloat& operator+=(const BigFloat& o) { return *this = *this + o; }
    BigFloat& operator-=(const BigFloat& o) { return *this = *this - o; }
    BigFloat& operator*=(const BigFloat& o) { return *this = *this * o; }
    BigFloat& operator/=(const BigFloat& o) { return *this = *this / o; }

    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) != 0; }
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

    int sign() const { return mpfr_sgn(v_); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }

    BigFloat abs() const {
        BigFloat r(prec_);
        mpfr_abs(r.v_, v_, MPFR_RNDN);
        return r;
    }
    BigFloat sqrt() const {
        if (sign() < 0) fail(ErrorCode::DomainError, "sqrt of negative BigFloat");
        BigFloat r(prec_);
        mpfr_sqrt(r.v_, v_, MPFR_RNDN);
        return r;
    }
    BigFloat floor() const {
        BigFloat r(prec_);
        mpfr_floor(r.v_, v_);
        return r;
    }

    // Every finite BigFloat is a dyadic rational; recover it exactly.
    Rational to_rational() const;

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    std::string to_string() const;  // deterministic, round-trips at same precision
    static BigFloat from_string(const std::string& text, mpfr_prec_t prec);

private:
    mpfr_prec_t match(const BigFloat& o) const {
        if (prec_ != o.prec_)
            fail(ErrorCode::BackendMismatch, "BigFloat precision mismatch");
        return prec_;
    }
    static mpfr_prec_t check_prec(mpfr_prec_t p) {
        if (p < min_precision)
            fail(ErrorCode::InvalidScene, "BigFloat precision below 64 bits");
        return p;
    }
    mpfr_t v_;
    mpfr_prec_t prec_;
};

enum class Backend { ExactRational, BigFloatBackend };

// Boundary type: one number under either backend. Module interfaces traffic
// in Scalar; simulation internals are templated on the concrete type.
class Scalar {
public:
    Scalar() : v_(Rational(0)) {}
    Scalar(Rational q) : v_(std::move(q)) {}
    Scalar(BigFloat f) : v_(std::move(f)) {}

    Backend backend() const {
        return std::holds_alternative<Rational>(v_) ? Backend::ExactRational
                                                    : Backend::BigFloatBackend;
    }
    bool is_rational() const { return std::holds_alternative<Rational>(v_); }
    const Rational& rational() const {
        if (!is_rational()) fail(ErrorCode::BackendMismatch, "Scalar is not rational");
        return std::get<Rational>(v_);
    }
    const BigFloat& bigfloat() const {
        if (is_rational()) fail(ErrorCode::BackendMismatch, "Scalar is not a BigFloat");
        return std::get<BigFloat>(v_);
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) { return a.zip(b, '+'); }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return a.zip(b, '-'); }
    friend Scalar operator*(const Scalar& a, const Scalar& b) { return a.zip(b, '*'); }
    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a.zip(b, '/'); }
    Scalar operator-() const {
        if (is_rational()) return Scalar(Rational(-rational()));
        return Scalar(-bigfloat());
    }

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.cmp(b) == 0; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return a.cmp(b) != 0; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return a.cmp(b) < 0; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return a.cmp(b) <= 0; }
    friend bool operator>(const Scalar& a, const Scalar& b) { return a.cmp(b) > 0; }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return a.cmp(b) >= 0; }

    std::string to_string() const {
        if (is_rational()) return rat_to_string(rational());
        return bigfloat().to_string();
    }

private:
    int cmp(const Scalar& o) const {
        if (is_rational() != o.is_rational())
            fail(ErrorCode::BackendMismatch, "comparing scalars of different backends");
        if (is_rational()) return ::mpq_cmp(rational().get_mpq_t(), o.rational().get_mpq_t());
        return mpfr_cmp(bigfloat().raw(), o.bigfloat().raw());
    }
    Scalar zip(const Scalar& o, char op) const {
        if (is_rational() != o.is_rational())
            fail(ErrorCode::BackendMismatch, "mixing scalar backends in arithmetic");
        if (is_rational()) {
            const Rational &a = rational(), &b = o.rational();
            switch (op) {
                case '+': return Scalar(Rational(a + b));
                case '-': return Scalar(Rational(a - b));
                case '*': return Scalar(Rational(a * b));
                default:
                    if (sgn(b) == 0) fail(ErrorCode::DomainError, "rational division by zero");
                    return Scalar(Rational(a / b));
            }
        }
        const BigFloat &a = bigfloat(), &b = o.bigfloat();
        switch (op) {
            case '+': return Scalar(a + b);
            case '-': return Scalar(a - b);
            case '*': return Scalar(a * b);
            default: return Scalar(a / b);
        }
    }
    std::variant<Rational, BigFloat> v_;
};

// Uniform helpers so geometry/simulation code can be templated on the concrete
// scalar type. The `like` argument carries the BigFloat precision and is
// ignored for rationals.
inline int scalar_sign(const Rational& q) { return sgn(q); }
inline int scalar_sign(const BigFloat& x) { return x.sign(); }

inline Rational scalar_like(long n, const Rational&) { return Rational(n); }
inline BigFloat scalar_like(long n, const BigFloat& like) { return BigFloat(n, like.precision()); }

inline Rational scalar_from_rational(const Rational& q, const Rational&) { return q; }
inline BigFloat scalar_from_rational(const Rational& q, const BigFloat& like) {
    return BigFloat(q, like.precision());
}

inline Rational scalar_abs(const Rational& q) { return Rational(::abs(q)); }
inline BigFloat scalar_abs(const BigFloat& x) { return x.abs(); }

inline Rational scalar_exact(const Rational& q) { return q; }
inline Rational scalar_exact(const BigFloat& x) { return x.to_rational(); }

inline std::string scalar_str(const Rational& q) { return rat_to_string(q); }
inline std::string scalar_str(const BigFloat& x) { return x.to_string(); }

inline Rational scalar_floor(const Rational& q) { return rat_floor(q); }
inline BigFloat scalar_floor(const BigFloat& x) { return x.floor(); }

// Square root in the scene backend: exact-or-error for rationals (geometry
// code only ever calls this where the construction guarantees a perfect
// square), rounded for BigFloat.
inline Rational scalar_sqrt_or_fail(const Rational& s) {
    auto r = rational_sqrt_exact(s);
    if (!r)
        fail(ErrorCode::NonRationalIntersection,
             "square root is irrational under the exact backend");
    return *r;
}
inline BigFloat scalar_sqrt_or_fail(const BigFloat& s) { return s.sqrt(); }

} // namespace pinball
