#include <doctest.h>

#include "pinball/components.hpp"

using namespace pinball;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }
Vec<Rational> v(const Rational& x, const Rational& y) { return {x, y}; }

RationalTimeFunction<Rational> rtf(std::vector<Rational> num, std::vector<Rational> den = {Rational(1)}) {
    return {Poly<Rational>(std::move(num)), Poly<Rational>(std::move(den))};
}

// triangle wave: out at slope s for half the period, back at slope -s
ScheduleT<Rational> triangle(Rational t_start, Rational half, Rational s) {
    ScheduleT<Rational> sch;
    sch.t_start = t_start;
    sch.period = half + half;
    sch.phases.push_back({half, rtf({q(0), s})});
    sch.phases.push_back({half, rtf({s * half, -s})});
    return sch;
}

} // namespace

TEST_CASE("wall reflection") {
    WallT<Rational> w{v(q(0), q(0)), v(q(1), q(0))};
    CHECK(respond_wall(v(q(1), q(-1)), w) == v(q(1), q(1)));
    CHECK(respond_wall(v(q(0), q(-3)), w) == v(q(0), q(3)));
    CHECK_THROWS_AS(respond_wall(v(q(1), q(0)), w), PinballError);
}

TEST_CASE("one-way gate sides") {
    // vertical gate; n = rot90ccw(end - start) = (-1, 0) points left, so the
    // gate is transparent for balls travelling rightwards
    OneWayGateT<Rational> g{v(q(0), q(0)), v(q(0), q(1))};
    auto pass = respond_gate(v(q(1), q(0)), g);
    CHECK(pass.passed);
    CHECK(pass.v == v(q(1), q(0)));

    auto block = respond_gate(v(q(-1), q(2)), g);
    CHECK(!block.passed);
    CHECK(block.v == v(q(1), q(2)));

    CHECK_THROWS_AS(respond_gate(v(q(0), q(1)), g), PinballError);
}

TEST_CASE("moving wall reflection in the rest frame") {
    Vec<Rational> n = v(q(1), q(0));
    CHECK(respond_moving_wall(v(q(-3), q(0)), v(q(1), q(0)), n) == v(q(5), q(0)));
    CHECK(respond_moving_wall(v(q(-3), q(0)), v(q(-1), q(0)), n) == v(q(1), q(0)));
    // tangentially sliding wall: same result as a static mirror
    CHECK(respond_moving_wall(v(q(-3), q(0)), v(q(0), q(2)), n) == v(q(3), q(0)));
    // ball keeping pace with the wall never touches it
    CHECK_THROWS_AS(respond_moving_wall(v(q(1), q(5)), v(q(1), q(0)), n), PinballError);
}

TEST_CASE("moving wall agrees with the static response when the wall rests") {
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(7);
    auto rnd = [&]() -> Rational {
        mpz_class z = rng.get_z_range(401) - 200;
        return Rational(z) / 13;
    };
    Vec<Rational> zero = v(q(0), q(0));
    int checked = 0;
    while (checked < 100) {
        Vec<Rational> vel{rnd(), rnd()};
        Vec<Rational> n{rnd(), rnd()};
        if (is_zero_vec(n) || sgn(dot(vel, n)) == 0) continue;
        WallT<Rational> w{v(q(0), q(0)), rot90ccw(n)}; // wall direction perp. to n
        CHECK(respond_moving_wall(vel, zero, n) == respond_wall(vel, w));
        ++checked;
    }
}

TEST_CASE("schedule displacement and velocity") {
    MovingWallT<Rational> m;
    m.a = v(q(0), q(0));
    m.b = v(q(2), q(0));
    m.motion_dir = v(q(0), q(1));
    m.schedule = triangle(q(10), q(1), q(1, 2));
    validate_schedule(m.schedule, "m");

    // before the schedule starts the wall rests at zero
    auto s0 = wall_state_at(m, q(3));
    CHECK(s0.first == q(0));
    CHECK(s0.second == v(q(0), q(0)));

    auto s1 = wall_state_at(m, q(21, 2)); // half-way out
    CHECK(s1.first == q(1, 4));
    CHECK(s1.second == v(q(0), q(1, 2)));

    auto s2 = wall_state_at(m, q(23, 2)); // half-way back
    CHECK(s2.first == q(1, 4));
    CHECK(s2.second == v(q(0), q(-1, 2)));

    // periodicity, including the exact period boundary
    CHECK(wall_state_at(m, q(25, 2)).first == q(1, 4));
    CHECK(wall_state_at(m, q(12)).first == q(0));
    CHECK(wall_state_at(m, q(12)).second == v(q(0), q(1, 2)));
}

TEST_CASE("schedule validation rejects broken phase lists") {
    auto sch = triangle(q(0), q(1), q(1, 2));
    validate_schedule(sch, "ok");

    auto bad = sch;
    bad.period = q(3);
    CHECK_THROWS_AS(validate_schedule(bad, "sum"), PinballError);

    bad = sch;
    bad.phases[1].move = rtf({q(1), q(-1, 2)}); // starts at 1, not at 1/2
    CHECK_THROWS_AS(validate_schedule(bad, "jump"), PinballError);

    bad = sch;
    bad.phases[1].move = rtf({q(1, 2), q(-1, 4)}); // ends at 1/4, not 0
    CHECK_THROWS_AS(validate_schedule(bad, "wrap"), PinballError);

    bad = sch;
    bad.phases[0].move = rtf({q(1, 100), q(1, 2)}); // offset start
    CHECK_THROWS_AS(validate_schedule(bad, "start"), PinballError);

    bad = sch;
    bad.phases[0].move.den = Poly<Rational>({q(1, 2), q(-1)}); // pole at 1/2
    CHECK_THROWS_AS(validate_schedule(bad, "pole"), PinballError);

    bad = sch;
    bad.phases.clear();
    CHECK_THROWS_AS(validate_schedule(bad, "empty"), PinballError);

    bad = sch;
    bad.phases[0].duration = q(0);
    CHECK_THROWS_AS(validate_schedule(bad, "zerodur"), PinballError);
}

TEST_CASE("wall speed cap proof") {
    MovingWallT<Rational> m;
    m.a = v(q(0), q(0));
    m.b = v(q(2), q(0));
    m.motion_dir = v(q(0), q(1));
    m.schedule = triangle(q(0), q(1), q(1, 2));

    // |wall speed| is exactly 1/2 throughout; cap^2 = 1/4 passes, anything
    // smaller fails
    validate_wall_speed_cap(m, q(1, 4), ErrorCode::InvalidScene, "m");
    CHECK_THROWS_AS(validate_wall_speed_cap(m, q(1, 5), ErrorCode::InvalidScene, "m"),
                    PinballError);

    // non-unit motion_dir scales the physical speed
    m.motion_dir = v(q(3), q(4)); // length 5
    CHECK_THROWS_AS(validate_wall_speed_cap(m, q(4), ErrorCode::InvalidScene, "m"),
                    PinballError);
    validate_wall_speed_cap(m, q(25, 4), ErrorCode::InvalidScene, "m");
}

TEST_CASE("bumper effect timeline") {
    BumperT<Rational> bp;
    bp.a = v(q(0), q(0));
    bp.b = v(q(1), q(0));
    bp.sign = 1;
    bp.t_start = q(3);
    bp.t_active = q(1);
    bp.period = q(2);
    bp.accel = rtf({q(1)}, {q(1), q(1)}); // a(tau) = 1/(tau + 1)
    validate_bumper(bp, "bp");

    CHECK(bumper_effect(bp, q(2)) == q(0));            // not yet active
    CHECK(bumper_effect(bp, q(7, 2)) == q(1, 3));      // tau = 1/2
    CHECK(bumper_effect(bp, q(9, 2)) == q(0));         // rest part of the period
    CHECK(bumper_effect(bp, q(11, 2)) == q(1, 3));     // next period
    CHECK(bumper_effect(bp, q(3)) == q(0));            // tau = 0

    bp.sign = -1;
    CHECK(bumper_effect(bp, q(7, 2)) == q(-1, 3));
}

TEST_CASE("bumper reflection changes speed, not direction") {
    BumperT<Rational> bp;
    bp.a = v(q(0), q(0));
    bp.b = v(q(1), q(0));
    bp.sign = 1;
    bp.t_start = q(0);
    bp.t_active = q(1);
    bp.period = q(2);
    bp.accel = rtf({q(1)}); // effect = tau

    // |v| = 1, effect 1/2 at tau = 1/2: leaves at speed 3/2, reversed
    CHECK(respond_bumper(v(q(0), q(-1)), bp, q(1, 2)) == v(q(0), q(3, 2)));
    CHECK(respond_bumper(v(q(3, 5), q(4, 5)), bp, q(1, 2)) == v(q(-9, 10), q(-6, 5)));

    // a decelerating bumper that eats the whole speed stops the ball: error
    BumperT<Rational> brake = bp;
    brake.sign = -1;
    brake.accel = rtf({q(2)}); // effect = -2 tau = -1 at tau = 1/2
    CHECK_THROWS_AS(respond_bumper(v(q(0), q(-1)), brake, q(1, 2)), PinballError);
    // barely surviving is fine
    CHECK(respond_bumper(v(q(0), q(-2)), brake, q(1, 2)) == v(q(0), q(1)));
}

TEST_CASE("bumper output is antiparallel for rational speeds") {
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(11);
    BumperT<Rational> bp;
    bp.a = v(q(0), q(0));
    bp.b = v(q(1), q(0));
    bp.sign = 1;
    bp.t_start = q(0);
    bp.t_active = q(1);
    bp.period = q(1);
    bp.accel = rtf({q(1, 7)});
    int checked = 0;
    while (checked < 50) {
        // Pythagorean directions keep |v| rational so the exact path works
        mpz_class mz = rng.get_z_range(20) + 1, nz = rng.get_z_range(20) + 22;
        Rational m(mz), n(nz);
        Vec<Rational> vel{n * n - m * m, m * n + m * n};
        Vec<Rational> out = respond_bumper(vel, bp, q(1, 2));
        CHECK(sgn(cross(out, vel)) == 0);
        CHECK(sgn(dot(out, vel)) < 0);
        ++checked;
    }
}

TEST_CASE("bumper validation") {
    BumperT<Rational> bp;
    bp.a = v(q(0), q(0));
    bp.b = v(q(1), q(0));
    bp.sign = 1;
    bp.t_start = q(0);
    bp.t_active = q(1);
    bp.period = q(2);
    bp.accel = rtf({q(1)});
    validate_bumper(bp, "ok");

    auto bad = bp;
    bad.b = bad.a;
    CHECK_THROWS_AS(validate_bumper(bad, "segment"), PinballError);

    bad = bp;
    bad.sign = 2;
    CHECK_THROWS_AS(validate_bumper(bad, "sign"), PinballError);

    bad = bp;
    bad.t_active = q(3);
    CHECK_THROWS_AS(validate_bumper(bad, "window"), PinballError);

    bad = bp;
    bad.accel = rtf({q(-1)}); // negative magnitude
    CHECK_THROWS_AS(validate_bumper(bad, "negative"), PinballError);

    bad = bp;
    bad.accel = rtf({q(1)}, {q(1, 2), q(-1)}); // pole inside the window
    CHECK_THROWS_AS(validate_bumper(bad, "pole"), PinballError);
}

TEST_CASE("big float components mirror the exact ones") {
    mpfr_prec_t prec = 128;
    auto bf = [&](const Rational& r) { return BigFloat(r, prec); };
    auto bv = [&](const Rational& x, const Rational& y) {
        return Vec<BigFloat>{bf(x), bf(y)};
    };

    WallT<BigFloat> w{bv(q(0), q(0)), bv(q(1), q(0))};
    CHECK(respond_wall(bv(q(1), q(-1)), w) == bv(q(1), q(1)));

    MovingWallT<BigFloat> m;
    m.a = bv(q(0), q(0));
    m.b = bv(q(2), q(0));
    m.motion_dir = bv(q(0), q(1));
    m.schedule.t_start = bf(q(10));
    m.schedule.period = bf(q(2));
    m.schedule.phases.push_back(
        {bf(q(1)), {Poly<BigFloat>({bf(q(0)), bf(q(1, 2))}), Poly<BigFloat>({bf(q(1))})}});
    m.schedule.phases.push_back(
        {bf(q(1)), {Poly<BigFloat>({bf(q(1)), bf(q(-1, 2))}), Poly<BigFloat>({bf(q(1))})}});
    auto s1 = wall_state_at(m, bf(q(21, 2)));
    CHECK(s1.first == bf(q(1, 4)));
    CHECK(s1.second == bv(q(0), q(1, 2)));
}
