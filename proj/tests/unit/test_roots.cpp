#include <doctest.h>

#include "pinball/roots.hpp"

using namespace pinball;

namespace {
Poly<Rational> poly(std::vector<long> c) {
    std::vector<Rational> r;
    for (long v : c) r.emplace_back(v);
    return Poly<Rational>(std::move(r));
}
Rational q(long n, long d = 1) { return Rational(n, d); }
} // namespace

TEST_CASE("poly eval / derivative / arithmetic") {
    auto p = Poly<Rational>({q(-6), q(11), q(-6), q(1)}); // (t-1)(t-2)(t-3)
    CHECK(p.eval(q(1)) == 0);
    CHECK(p.eval(q(2)) == 0);
    CHECK(p.eval(q(4)) == q(6));
    auto d = p.derivative();
    CHECK(d.coeffs() == std::vector<Rational>{q(11), q(-12), q(3)});
    auto prod = poly({-1, 1}) * poly({-2, 1});
    CHECK(prod.coeffs() == std::vector<Rational>{q(2), q(-3), q(1)});
    CHECK((prod - prod).is_zero());
}

TEST_CASE("square-free part collapses multiplicities") {
    auto p = poly({-1, 1}) * poly({-1, 1}) * poly({-2, 1});
    auto sf = poly_square_free(p);
    CHECK(sf.degree() == 2);
    CHECK(sgn(sf.eval(q(1))) == 0);
    CHECK(sgn(sf.eval(q(2))) == 0);
}

TEST_CASE("exact roots: quadratics") {
    Interval<Rational> I{q(0), q(3), true, true};
    auto r = poly_roots_exact(poly({-1, 0, 1}), I); // t^2 - 1 on [0,3]
    REQUIRE(r.size() == 1);
    CHECK(r[0] == q(1));

    // (t-1/2)(t-3/2) on [0,2]
    auto p2 = Poly<Rational>({q(3, 4), q(-2), q(1)});
    auto r2 = poly_roots_exact(p2, Interval<Rational>{q(0), q(2), true, true});
    REQUIRE(r2.size() == 2);
    CHECK(r2[0] == q(1, 2));
    CHECK(r2[1] == q(3, 2));
}

TEST_CASE("exact roots: endpoint flags") {
    auto p = poly({10, -7, 1}); // (t-2)(t-5)
    auto closed = poly_roots_exact(p, Interval<Rational>{q(2), q(5), true, true});
    REQUIRE(closed.size() == 2);
    CHECK(closed[0] == q(2));
    CHECK(closed[1] == q(5));
    auto open = poly_roots_exact(p, Interval<Rational>{q(2), q(5), false, false});
    CHECK(open.empty());
}

TEST_CASE("exact roots: degree 5 with rational-root certification") {
    // (t-1)(t-2)(t-3)(t^2+1): real roots 1,2,3
    auto p = poly({-6, 11, -12, 12, -6, 1});
    auto r = poly_roots_exact(p, Interval<Rational>{q(0), q(10), true, true});
    REQUIRE(r.size() == 3);
    CHECK(r[0] == q(1));
    CHECK(r[1] == q(2));
    CHECK(r[2] == q(3));
}

TEST_CASE("exact roots: irrational root raises") {
    auto p = poly({0, -2, 0, 1}); // t^3 - 2t, roots 0, ±sqrt(2)
    Interval<Rational> I{q(0), q(2), false, true};
    CHECK_THROWS_WITH_AS(static_cast<void>(poly_roots_exact(p, I)),
                         doctest::Contains("irrational"), PinballError);
    // but an interval that provably contains no root stays quiet
    auto none = poly_roots_exact(p, Interval<Rational>{q(0), q(7, 5), false, true});
    CHECK(none.empty());
}

TEST_CASE("exact roots: multiplicity collapsed") {
    auto p = poly({1, -2, 1}); // (t-1)^2
    auto r = poly_roots_exact(p, Interval<Rational>{q(0), q(2), true, true});
    REQUIRE(r.size() == 1);
    CHECK(r[0] == q(1));
}

TEST_CASE("zero polynomial is a degenerate contact") {
    CHECK_THROWS_AS(static_cast<void>(
                        poly_roots_exact(Poly<Rational>(), Interval<Rational>{q(0), q(1), true, true})),
                    PinballError);
}

TEST_CASE("bigfloat roots: sqrt(2) by bisection") {
    auto p = poly({0, -2, 0, 1}); // t^3 - 2t
    Interval<Rational> I{q(0), q(2), false, true};
    auto r = poly_roots_bigfloat(p, I, 256);
    REQUIRE(r.size() == 1);
    BigFloat two(q(2), 256);
    BigFloat resid = (r[0] * r[0] - two).abs();
    // cross-check by squaring: far below 1e-30 at 256 bits
    BigFloat bound(Rational(1, mpz_class("1000000000000000000000000000000")), 256);
    CHECK(resid < bound);
}

TEST_CASE("bigfloat roots: exact rational roots come out exact") {
    auto p = Poly<Rational>({q(3, 4), q(-2), q(1)});
    auto r = poly_roots_bigfloat(p, Interval<Rational>{q(0), q(2), true, true}, 128);
    REQUIRE(r.size() == 2);
    CHECK(r[0].to_rational() == q(1, 2));
    CHECK(r[1].to_rational() == q(3, 2));
}

TEST_CASE("bigfloat roots: depth cap raises AmbiguousRoot") {
    auto p = poly({0, -2, 0, 1});
    Interval<Rational> I{q(0), q(2), false, true};
    RootIsolationOptions opt;
    opt.max_bisections = 1;
    CHECK_THROWS_WITH_AS(static_cast<void>(poly_roots_bigfloat(p, I, 256, opt)),
                         doctest::Contains("depth cap"), PinballError);
}

TEST_CASE("root counting") {
    auto p = poly({0, -2, 0, 1}); // roots 0, ±sqrt(2)
    CHECK(poly_count_roots(p, Interval<Rational>{q(0), q(2), true, true}) == 2);
    CHECK(poly_count_roots(p, Interval<Rational>{q(0), q(2), false, true}) == 1);
    CHECK(poly_count_roots(p, Interval<Rational>{q(-3), q(3), true, true}) == 3);
    CHECK(poly_count_roots(p, Interval<Rational>{q(3), q(4), true, true}) == 0);
}

TEST_CASE("nonnegativity decision") {
    CHECK(poly_nonnegative_on(poly({1, -2, 1}), q(0), q(2)));        // (t-1)^2
    CHECK(poly_nonnegative_on(poly({0, 0, 1}), q(-1), q(1)));        // t^2
    CHECK_FALSE(poly_nonnegative_on(poly({-1, 3, -3, 1}), q(0), q(2))); // (t-1)^3
    CHECK(poly_nonnegative_on(poly({0, 2, -1}), q(0), q(2)));        // t(2-t), zero at both ends
    // negative inside, zero at both closed endpoints, no sign crossing
    auto neg = -(poly({0, 1}) * poly({0, 1}) * poly({-1, 1}) * poly({-1, 1}));
    CHECK_FALSE(poly_nonnegative_on(neg, q(0), q(1)));
}

TEST_CASE("roots_in_interval on a rational time function") {
    // t/(t+1) = 1/3  =>  t = 1/2
    RationalTimeFunction<Rational> f;
    f.num = poly({0, 1});
    f.den = poly({1, 1});
    auto r = roots_in_interval(f, q(1, 3), q(0), Interval<Rational>{q(0), q(2), true, true});
    REQUIRE(r.size() == 1);
    CHECK(r[0] == q(1, 2));

    // dyadic data stays exact through the BigFloat path: t^2 = 1/4 => t = 1/2
    RationalTimeFunction<BigFloat> fb;
    std::vector<BigFloat> nc;
    nc.emplace_back(q(0), 192);
    nc.emplace_back(q(0), 192);
    nc.emplace_back(q(1), 192);
    fb.num = Poly<BigFloat>(std::move(nc));
    fb.den = Poly<BigFloat>::constant(BigFloat(q(1), 192));
    Interval<BigFloat> ib{BigFloat(q(0), 192), BigFloat(q(2), 192), true, true};
    auto rb = roots_in_interval(fb, BigFloat(q(1, 4), 192), BigFloat(q(0), 192), ib);
    REQUIRE(rb.size() == 1);
    CHECK(rb[0].to_rational() == q(1, 2));

    // non-dyadic constant: 1/3 rounds at 192 bits, so the root may only be
    // pinned to the refinement tolerance (2^-128 here), not exactly
    auto rb2 = roots_in_interval(fb, BigFloat(q(1, 9), 192), BigFloat(q(0), 192), ib);
    REQUIRE(rb2.size() == 1);
    BigFloat err = (rb2[0] * rb2[0] - BigFloat(q(1, 9), 192)).abs();
    CHECK(err < BigFloat(Rational(1, mpz_class("1000000000000000000000000000000")), 192));
}
