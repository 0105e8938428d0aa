#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pinball/errors.hpp"
#include "pinball/scalar.hpp"

namespace pinball {

// Loader-enforced bound on schedule polynomial degree. Everything the gadget
// layer emits stays at degree <= 5; the cap bounds root-isolation cost.
inline constexpr int schedule_degree_cap = 8;

// Dense univariate polynomial, coefficients ascending by degree. Trailing
// zeros are stripped so degree() is honest; the zero polynomial has an empty
// coefficient list and degree -1.
template <class S>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<S> coeffs) : c_(std::move(coeffs)) { strip(); }

    static Poly constant(const S& v) { return Poly(std::vector<S>{v}); }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<S>& coeffs() const { return c_; }
    const S& leading() const { return c_.back(); }

    S eval(const S& t) const {
        if (c_.empty()) return scalar_like(0, t);
        S acc = c_.back();
        for (size_t i = c_.size() - 1; i-- > 0;) acc = acc * t + c_[i];
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<S> d;
        d.reserve(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i)
            d.push_back(c_[i] * scalar_like(static_cast<long>(i), c_[i]));
        return Poly(std::move(d));
    }

private:
    std::vector<S> c_;

    void strip() {
        while (!c_.empty() && scalar_sign(c_.back()) == 0) c_.pop_back();
    }
};

template <class S>
Poly<S> operator+(const Poly<S>& a, const Poly<S>& b) {
    const auto &ca = a.coeffs(), &cb = b.coeffs();
    std::vector<S> r;
    r.reserve(std::max(ca.size(), cb.size()));
    for (size_t i = 0; i < std::max(ca.size(), cb.size()); ++i) {
        if (i < ca.size() && i < cb.size()) r.push_back(ca[i] + cb[i]);
        else if (i < ca.size()) r.push_back(ca[i]);
        else r.push_back(cb[i]);
    }
    return Poly<S>(std::move(r));
}

template <class S>
Poly<S> operator-(const Poly<S>& a) {
    std::vector<S> r;
    r.reserve(a.coeffs().size());
    for (const S& c : a.coeffs()) r.push_back(-c);
    return Poly<S>(std::move(r));
}

template <class S>
Poly<S> operator-(const Poly<S>& a, const Poly<S>& b) {
    return a + (-b);
}

template <class S>
Poly<S> operator*(const Poly<S>& a, const Poly<S>& b) {
    if (a.is_zero() || b.is_zero()) return Poly<S>();
    const auto &ca = a.coeffs(), &cb = b.coeffs();
    std::vector<S> r(ca.size() + cb.size() - 1, scalar_like(0, ca[0]));
    for (size_t i = 0; i < ca.size(); ++i)
        for (size_t j = 0; j < cb.size(); ++j) r[i + j] = r[i + j] + ca[i] * cb[j];
    return Poly<S>(std::move(r));
}

template <class S>
Poly<S> operator*(const Poly<S>& a, const S& k) {
    std::vector<S> r;
    r.reserve(a.coeffs().size());
    for (const S& c : a.coeffs()) r.push_back(c * k);
    return Poly<S>(std::move(r));
}

template <class S>
struct Interval {
    S lo{};
    S hi{};
    bool lo_closed = true;
    bool hi_closed = true;
};

template <class S>
Interval<S> make_interval(S lo, S hi, bool lo_closed, bool hi_closed) {
    if (hi < lo) fail(ErrorCode::InvalidGeometry, "interval with hi < lo");
    return Interval<S>{std::move(lo), std::move(hi), lo_closed, hi_closed};
}

template <class S>
bool contains(const Interval<S>& I, const S& v) {
    if (v < I.lo || (v == I.lo && !I.lo_closed)) return false;
    if (v > I.hi || (v == I.hi && !I.hi_closed)) return false;
    return true;
}

// Ratio of two polynomials of time. The denominator must be nonzero on the
// function's declared domain; scene validation enforces that together with
// the degree cap.
template <class S>
struct RationalTimeFunction {
    Poly<S> num;
    Poly<S> den = Poly<S>::constant(scalar_like(1, S{}));

    S eval(const S& t) const { return num.eval(t) / den.eval(t); }

    // d/dt (num/den) as another rational function: (num' den - num den')/den^2.
    RationalTimeFunction derivative() const {
        RationalTimeFunction d;
        d.num = num.derivative() * den - num * den.derivative();
        d.den = den * den;
        return d;
    }
};

} // namespace pinball
