#include <doctest.h>

#include "pinball/geometry.hpp"

using namespace pinball;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }
Vec<Rational> v(const Rational& x, const Rational& y) { return {x, y}; }

BallStateT<Rational> ball(Rational px, Rational py, Rational vx, Rational vy,
                          Rational t = Rational(0)) {
    return {{px, py}, {vx, vy}, t};
}

} // namespace

TEST_CASE("reflect across a normal") {
    CHECK(reflect(v(q(1), q(-1)), v(q(0), q(1))) == v(q(1), q(1)));
    CHECK(reflect(v(q(0), q(-1)), v(q(-2), q(1))) == v(q(-4, 5), q(-3, 5)));
    CHECK(reflect(v(q(3), q(0)), v(q(1), q(0))) == v(q(-3), q(0)));
    CHECK_THROWS_AS(reflect(v(q(1), q(0)), v(q(0), q(0))), PinballError);
}

TEST_CASE("reflect is a speed-preserving involution") {
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(42);
    auto rnd = [&]() -> Rational {
        // explicit return type: the / expression is a lazy gmp template that
        // must not outlive z
        mpz_class z = rng.get_z_range(2001) - 1000;
        return Rational(z) / 97;
    };
    for (int i = 0; i < 200; ++i) {
        Vec<Rational> vel{rnd(), rnd()};
        Vec<Rational> n{rnd(), rnd()};
        if (is_zero_vec(n)) continue;
        Vec<Rational> r = reflect(vel, n);
        CHECK(reflect(r, n) == vel);
        CHECK(dot(r, r) == dot(vel, vel));
    }
}

TEST_CASE("parabola normals") {
    ParabolaT<Rational> up{q(1), q(0), q(0), q(0), q(2)}; // y = x^2 on [0,2]
    CHECK(parabola_normal(up, q(0)) == v(q(0), q(1)));
    CHECK(parabola_normal(up, q(1)) == v(q(-2), q(1)));
    ParabolaT<Rational> down{q(-2), q(0), q(3, 8), q(-1), q(0)}; // y = -2x^2 + 3/8
    CHECK(parabola_normal(down, q(-1, 2)) == v(q(-2), q(1)));
    CHECK_THROWS_AS(parabola_normal(up, q(3)), PinballError);
}

TEST_CASE("parabola focus") {
    ParabolaT<Rational> up{q(1), q(0), q(0), q(0), q(2)};
    CHECK(parabola_focus(up) == v(q(0), q(1, 4)));
    // the reflector family used by the speed gadgets shares one focus
    ParabolaT<Rational> down{q(-2), q(0), q(3, 8), q(-1), q(0)};
    CHECK(parabola_focus(down) == v(q(0), q(1, 4)));
    ParabolaT<Rational> half{q(-1, 2), q(0), q(3, 4), q(-4), q(0)};
    CHECK(parabola_focus(half) == v(q(0), q(1, 4)));
    ParabolaT<Rational> rev{q(-1), q(0), q(1, 2), q(-2), q(0)};
    CHECK(parabola_focus(rev) == v(q(0), q(1, 4)));
    ParabolaT<Rational> wide{q(1, 4), q(0), q(0), q(-3), q(3)};
    CHECK(parabola_focus(wide) == v(q(0), q(1)));
}

TEST_CASE("ray vs segment") {
    auto t = ray_segment_hit(ball(q(0), q(2), q(0), q(-1)), v(q(-1), q(0)), v(q(1), q(0)));
    REQUIRE(t.has_value());
    CHECK(*t == q(2));

    // moving away
    CHECK(!ray_segment_hit(ball(q(0), q(2), q(0), q(1)), v(q(-1), q(0)), v(q(1), q(0))));

    // oblique hit, and the time offset is carried through
    auto t2 = ray_segment_hit(ball(q(0), q(0), q(1), q(1), q(5)), v(q(2), q(0)), v(q(2), q(4)));
    REQUIRE(t2.has_value());
    CHECK(*t2 == q(7));

    // misses the segment's span
    CHECK(!ray_segment_hit(ball(q(0), q(2), q(0), q(-1)), v(q(1), q(0)), v(q(3), q(0))));

    // endpoint contact still reports a hit; the simulator rejects it later
    auto t3 = ray_segment_hit(ball(q(1), q(2), q(0), q(-1)), v(q(-1), q(0)), v(q(1), q(0)));
    REQUIRE(t3.has_value());
    CHECK(*t3 == q(2));

    // parallel but offset: no contact
    CHECK(!ray_segment_hit(ball(q(0), q(1), q(1), q(0)), v(q(2), q(0)), v(q(5), q(0))));

    // collinear approach is degenerate
    CHECK_THROWS_AS(ray_segment_hit(ball(q(0), q(0), q(1), q(0)), v(q(2), q(0)), v(q(5), q(0))),
                    PinballError);

    CHECK_THROWS_AS(ray_segment_hit(ball(q(0), q(0), q(0), q(0)), v(q(2), q(0)), v(q(5), q(0))),
                    PinballError);
    CHECK_THROWS_AS(ray_segment_hit(ball(q(0), q(0), q(1), q(0)), v(q(2), q(1)), v(q(2), q(1))),
                    PinballError);
}

TEST_CASE("ray vs parabola, vertical and oblique") {
    ParabolaT<Rational> up{q(1), q(0), q(0), q(0), q(2)}; // y = x^2 on [0,2]

    auto h = ray_parabola_hit(ball(q(3, 2), q(4), q(0), q(-1)), up);
    REQUIRE(h.has_value());
    CHECK(h->first == q(7, 4));
    CHECK(h->second == v(q(3, 2), q(9, 4)));

    // outside the domain: the arc ends at x = 2
    CHECK(!ray_parabola_hit(ball(q(3), q(5), q(0), q(-1)), up));

    ParabolaT<Rational> down{q(-2), q(0), q(3, 8), q(-1), q(0)};
    auto h2 = ray_parabola_hit(ball(q(1), q(1), q(-4, 5), q(-3, 5)), down);
    REQUIRE(h2.has_value());
    CHECK(h2->first == q(15, 8));
    CHECK(h2->second == v(q(-1, 2), q(-1, 8)));
}

TEST_CASE("ray tangent to a parabola") {
    ParabolaT<Rational> up{q(1), q(0), q(0), q(0), q(2)};
    // y = 2x - 1 touches y = x^2 at (1,1)
    auto h = ray_parabola_hit(ball(q(0), q(-1), q(1), q(2)), up);
    REQUIRE(h.has_value());
    CHECK(h->first == q(1));
    CHECK(h->second == v(q(1), q(1)));
}

TEST_CASE("irrational parabola intersections under the exact backend") {
    ParabolaT<Rational> up{q(1), q(0), q(0), q(0), q(2)};
    // x^2 + x - 3 = 0 has its positive root inside [0,2]: a genuine contact
    // whose time is irrational, so the exact backend must refuse.
    CHECK_THROWS_AS(ray_parabola_hit(ball(q(0), q(3), q(1), q(-1)), up), PinballError);

    // mirrored ray: the crossing happens at x < 0, outside the arc, so there
    // is no contact and no error either
    CHECK(!ray_parabola_hit(ball(q(0), q(3), q(-1), q(-1)), up));

    // both roots behind the ball: no contact
    CHECK(!ray_parabola_hit(ball(q(3), q(4), q(1), q(1)), up));
}

TEST_CASE("irrational parabola intersections under big floats") {
    mpfr_prec_t prec = 256;
    auto bf = [&](const Rational& r) { return BigFloat(r, prec); };
    ParabolaT<BigFloat> up{bf(q(1)), bf(q(0)), bf(q(0)), bf(q(0)), bf(q(2))};
    BallStateT<BigFloat> b{{bf(q(0)), bf(q(3))}, {bf(q(1)), bf(q(-1))}, bf(q(0))};
    auto h = ray_parabola_hit(b, up);
    REQUIRE(h.has_value());
    // the hit abscissa solves x^2 + x - 3 = 0
    BigFloat x = h->second.x;
    BigFloat resid = (x * x + x - bf(q(3))).abs();
    CHECK(resid < bf(q(1, 1000000)) * bf(q(1, 1000000)) * bf(q(1, 1000000)) * bf(q(1, 1000000)));
    CHECK(h->second.y > bf(q(0)));
}
