#pragma once

#include <type_traits>
#include <vector>

#include "pinball/poly.hpp"

namespace pinball {

struct RootIsolationOptions {
    // Bisections spent on one root (isolation splits + refinement) before the
    // solver gives up with AmbiguousRoot. Determinism over guessing.
    int max_bisections = 200;
    // BigFloat refinement target: isolating interval width <= 2^-tolerance_exp.
    // 0 derives the exponent from the working precision (prec/2 + 32).
    long tolerance_exp = 0;
};

// All real roots of p inside I under the exact backend. Every root inside I
// must be certified rational; an uncertifiable or irrational root raises
// NonRationalIntersection. Multiplicities are collapsed.
std::vector<Rational> poly_roots_exact(const Poly<Rational>& p, const Interval<Rational>& I,
                                       const RootIsolationOptions& opt = {});

// All real roots of p inside I, isolated exactly (Sturm) and refined by
// bisection with exact rational sign evaluation, then rounded to `precision`.
std::vector<BigFloat> poly_roots_bigfloat(const Poly<Rational>& p, const Interval<Rational>& I,
                                          mpfr_prec_t precision,
                                          const RootIsolationOptions& opt = {});

// Number of distinct real roots of p in I (exact).
int poly_count_roots(const Poly<Rational>& p, const Interval<Rational>& I);

// Exact decision of "p(x) >= 0 for every x in [lo, hi]". Used by scene
// validation to prove wall-speed caps symbolically.
bool poly_nonnegative_on(const Poly<Rational>& p, const Rational& lo, const Rational& hi);

Poly<Rational> poly_square_free(const Poly<Rational>& p);

inline Poly<Rational> poly_to_rational(const Poly<Rational>& p) { return p; }
Poly<Rational> poly_to_rational(const Poly<BigFloat>& p);

// Roots of f(t) - (c0 + c1*t) on I in the scene backend. BigFloat
// coefficients are dyadic rationals, so the equation converts exactly and the
// isolation itself is always exact; only the final rounding differs.
template <class S>
std::vector<S> roots_in_interval(const RationalTimeFunction<S>& f, const S& c0, const S& c1,
                                 const Interval<S>& I, const RootIsolationOptions& opt = {}) {
    Poly<Rational> num = poly_to_rational(f.num);
    Poly<Rational> den = poly_to_rational(f.den);
    Poly<Rational> affine(std::vector<Rational>{scalar_exact(c0), scalar_exact(c1)});
    Poly<Rational> g = num - affine * den;
    Interval<Rational> ir{scalar_exact(I.lo), scalar_exact(I.hi), I.lo_closed, I.hi_closed};
    if constexpr (std::is_same_v<S, Rational>) {
        return poly_roots_exact(g, ir, opt);
    } else {
        return poly_roots_bigfloat(g, ir, c0.precision(), opt);
    }
}

} // namespace pinball
