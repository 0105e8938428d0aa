#include <doctest.h>

#include <algorithm>

#include "pinball/gadgets.hpp"
#include "pinball/scene.hpp"
#include "pinball/simulator.hpp"

using namespace pinball;

namespace {

Rational q(long n, long d = 1) { return Rational(n) / Rational(d); }

Scene gadget_scene(const Gadget& g, Backend backend = Backend::ExactRational) {
    Scene s;
    s.backend = backend;
    s.ray_mode = g.ray_mode;
    s.allow_exact_moving = true;
    s.speed_cap_ratio = g.speed_cap;
    s.components = g.fragment;
    return s;
}

BallR enter(const Gadget& g, const Rational& ds, const Rational& t, bool second = false) {
    const Port& p = second ? *g.input_b : g.input;
    VecR pos = p.base + p.axis * ds;
    VecR vel = p.inward * g.entry_speed;
    Rational at = p.time_base + t;
    return {pos, vel, at};
}

VecR out_point(const Gadget& g, size_t k, const Rational& ds) {
    Rational o = g.declared[k].space.slope * ds + g.declared[k].space.intercept;
    return g.outputs[k].base + g.outputs[k].axis * o;
}

Rational out_time(const Gadget& g, size_t k, const Rational& t) {
    Rational r = g.outputs[k].time_base + g.declared[k].time.slope * t +
                 g.declared[k].time.intercept;
    return r;
}

RunResult run_through(const Gadget& g, const Rational& ds, const Rational& t, size_t port = 0,
                      bool second = false) {
    Scene s = gadget_scene(g);
    s.ball = enter(g, ds, t, second);
    s.target = out_point(g, port, ds);
    validate_scene(s);
    Rational horizon = out_time(g, port, t) + 16;
    return run(s, s.ball, 128, horizon);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const PinballError& e) {
        return e.code();
    }
    FAIL("expected a PinballError");
    return ErrorCode::InvalidConfig;
}

long count_moving(const Gadget& g) {
    long n = 0;
    for (const auto& c : g.fragment)
        if (std::holds_alternative<MovingWallR>(c.shape)) ++n;
    return n;
}

const MovingWallR& moving_by_id(const Gadget& g, const std::string& id) {
    for (const auto& c : g.fragment)
        if (c.id == id) return std::get<MovingWallR>(c.shape);
    FAIL("no such wall: ", id);
    throw std::logic_error("unreachable");
}

} // namespace

TEST_CASE("confocal pair: frozen curves, halved offsets, reversed order") {
    Gadget g = make_space_mult(Factor::Half);
    REQUIRE(g.fragment.size() == 2);
    const auto& in = std::get<ParabolaR>(g.fragment[0].shape);
    CHECK(in.a == q(1));
    CHECK(in.b == q(0));
    CHECK(in.c == q(0));
    CHECK(in.x0 == q(0));
    CHECK(in.x1 == q(2));
    const auto& out = std::get<ParabolaR>(g.fragment[1].shape);
    CHECK(out.a == q(-2));
    CHECK(out.b == q(0));
    CHECK(out.c == q(3, 8));
    CHECK(out.x0 == q(-1));
    CHECK(out.x1 == q(0));

    CHECK(g.declared[0].space.slope == q(1, 2));
    CHECK(g.declared[0].time.intercept == q(31, 4));
    CHECK(g.declared[0].reversing);

    // s = 3/2 lands at offset 3/4 on the exit line after exactly 31/4.
    RunResult rr = run_through(g, q(3, 2), q(0));
    REQUIRE(rr.outcome.kind == Outcome::Kind::Hit);
    CHECK(rr.outcome.time.rational() == q(31, 4));
    CHECK(rr.reflections == 2);
    CHECK(dot(rr.final_state.vel, rr.final_state.vel).rational() == q(1));

    VerifyReport rep = verify_transfer(g, 33, Backend::ExactRational);
    CHECK(rep.samples == 33);
    CHECK(rep.routed[0] == 33);
    CHECK(rep.reversing);
}

TEST_CASE("confocal pair: doubling variant") {
    Gadget g = make_space_mult(Factor::Double);
    const auto& out = std::get<ParabolaR>(g.fragment[1].shape);
    CHECK(out.a == q(-1, 2));
    CHECK(out.c == q(3, 4));
    CHECK(out.x0 == q(-2));
    CHECK(g.declared[0].space.slope == q(2));
    CHECK(g.declared[0].time.intercept == q(29, 2));
    verify_transfer(g, 17, Backend::ExactRational);
}

TEST_CASE("order reverser keeps offsets and flips orientation") {
    Gadget g = make_order_reverser();
    const auto& out = std::get<ParabolaR>(g.fragment[1].shape);
    CHECK(out.a == q(-1));
    CHECK(out.c == q(1, 2));
    CHECK(g.declared[0].space.slope == q(1));
    CHECK(g.declared[0].time.intercept == q(10));
    CHECK(g.declared[0].reversing);
    verify_transfer(g, 9, Backend::ExactRational);
}

TEST_CASE("verification rejects a corrupted gadget") {
    // A shifted exit curve breaks the shared-focus identity, so contact
    // times stop being rational and the exact backend refuses to continue.
    Gadget g = make_space_mult(Factor::Half);
    auto& out = std::get<ParabolaR>(g.fragment[1].shape);
    out.c = out.c + q(1, 64);
    CHECK(code_of([&] { verify_transfer(g, 5, Backend::ExactRational); }) ==
          ErrorCode::NonRationalIntersection);

    // A wrong declared map leaves the physics intact but the ball reaches
    // none of the declared exits.
    Gadget g2 = make_space_mult(Factor::Half);
    g2.declared[0].space.intercept = q(1, 64);
    CHECK(code_of([&] { verify_transfer(g2, 5, Backend::ExactRational); }) ==
          ErrorCode::VerificationFailure);
}

TEST_CASE("push writes a bit below the halved offset") {
    Gadget p0 = make_push(0);
    Gadget p1 = make_push(1);
    CHECK(p0.declared[0].space.slope == q(1, 2));
    CHECK(p0.declared[0].space.intercept == q(0));
    CHECK(p1.declared[0].space.intercept == q(1, 2));
    CHECK_FALSE(p0.declared[0].reversing); // two reversals cancel

    // The bit lives in the exit frame: the landing point is the same, but the
    // port base of push-1 sits half a unit back, so whatever is welded onto
    // it reads the offset as s/2 + 1/2.
    CHECK(out_point(p1, 0, q(1, 2)) == out_point(p0, 0, q(1, 2)));
    CHECK(p0.outputs[0].base == p1.outputs[0].base + p1.outputs[0].axis * q(1, 2));

    // both bits take identical time: the fragments are congruent
    CHECK(out_time(p0, 0, q(1, 3)) == out_time(p1, 0, q(1, 3)));
    CHECK(out_time(p0, 0, q(0)) == q(31, 4) + q(10));

    verify_transfer(p0, 9, Backend::ExactRational);
    verify_transfer(p1, 9, Backend::ExactRational);
}

TEST_CASE("pop splits the doubled beam on the leading bit") {
    Gadget g = make_pop_space();
    REQUIRE(g.outputs.size() == 2);
    CHECK(g.declared[0].space.slope == q(2));
    CHECK(g.declared[0].space.intercept == q(0));
    CHECK(g.declared[1].space.slope == q(2));
    CHECK(g.declared[1].space.intercept == q(-1));
    CHECK(g.outputs[0].time_base == q(29, 2));
    CHECK(g.declared[0].time.intercept == q(13));
    CHECK(g.declared[1].time.intercept == q(16));

    REQUIRE(g.route);
    CHECK(g.route(q(1, 4), q(0)) == 0);
    CHECK(g.route(q(3, 4), q(0)) == 1);
    CHECK(g.route(q(5, 8), q(0)) == 1);

    // 3/4 = .11 pops bit 1 leaving 1/2; 5/8 = .101 pops bit 1 leaving 1/4
    RunResult rr = run_through(g, q(3, 4), q(0), 1);
    REQUIRE(rr.outcome.kind == Outcome::Kind::Hit);
    CHECK(rr.final_state.pos.x.rational() == g.outputs[1].base.x + q(1, 2));
    rr = run_through(g, q(5, 8), q(0), 1);
    REQUIRE(rr.outcome.kind == Outcome::Kind::Hit);
    CHECK(rr.final_state.pos.x.rational() == g.outputs[1].base.x + q(1, 4));
    rr = run_through(g, q(1, 4), q(0), 0);
    REQUIRE(rr.outcome.kind == Outcome::Kind::Hit);
    CHECK(rr.final_state.pos.x.rational() == g.outputs[0].base.x + q(1, 2));

    VerifyReport rep = verify_transfer(g, 32, Backend::ExactRational);
    CHECK(rep.routed[0] == 16);
    CHECK(rep.routed[1] == 16);
}

TEST_CASE("delay pads transit time without moving the beam") {
    CHECK(code_of([] { make_delay(Rational(0)); }) == ErrorCode::InvalidGeometry);

    Gadget g = make_delay(Rational(4));
    CHECK(g.declared[0].space.slope == q(1));
    CHECK(g.declared[0].time.intercept == q(12)); // straight-line 8 plus the detour
    verify_transfer(g, 9, Backend::ExactRational);

    Gadget chained = compose(make_delay(Rational(4)), make_delay(Rational(6)));
    CHECK(out_time(chained, 0, q(0)) == q(26));
    verify_transfer(chained, 9, Backend::ExactRational);
}

TEST_CASE("rejoin merges two entries with equal transit") {
    Gadget g = make_rejoin();
    REQUIRE(g.input_b.has_value());
    CHECK(g.declared[0].time.intercept == q(18));

    RunResult a = run_through(g, q(1, 2), q(0), 0, false);
    RunResult b = run_through(g, q(1, 2), q(0), 0, true);
    REQUIRE(a.outcome.kind == Outcome::Kind::Hit);
    REQUIRE(b.outcome.kind == Outcome::Kind::Hit);
    CHECK(a.outcome.time.rational() == q(18));
    CHECK(b.outcome.time.rational() == q(18));

    auto gate_kind = [](const RunResult& rr) {
        for (const auto& ev : rr.trace.events)
            if (ev.component_id == "merge-gate") return ev.kind;
        FAIL("no merge-gate event");
        return EventKind::Pass;
    };
    CHECK(gate_kind(a) == EventKind::Pass);    // first entry slips through
    CHECK(gate_kind(b) == EventKind::Reflect); // second entry is turned down

    VerifyReport rep = verify_transfer(g, 16, Backend::ExactRational);
    CHECK(rep.routed[0] == 16);
}

TEST_CASE("bumper shaft doubles time offsets exactly") {
    Gadget g = make_time_mult_bumpers(Factor::Double, q(1), q(1), q(1), q(1));
    CHECK(g.declared[0].time.slope == q(2));
    CHECK(g.declared[0].time.intercept == q(3));
    CHECK_FALSE(g.declared[0].reversing);

    const Rational ds = g.input.offsets.hi / 2;
    const Rational entries[] = {q(0), q(1, 2), q(1), q(3, 2), q(33, 17)};
    for (const Rational& ts : entries) {
        RunResult rr = run_through(g, ds, ts);
        REQUIRE(rr.outcome.kind == Outcome::Kind::Hit);
        CHECK(rr.outcome.time.rational() == 2 * ts + 3);
        CHECK(dot(rr.final_state.vel, rr.final_state.vel).rational() == q(1));

        std::vector<Rational> hits;
        for (const auto& ev : rr.trace.events)
            if (ev.kind == EventKind::BumperHit) hits.push_back(ev.time.rational());
        REQUIRE(hits.size() == 2);
        CHECK(hits[0] == ts + 1);     // first pad, at entry speed
        CHECK(hits[1] == 2 * ts + 2); // leg of length 1 at the retuned speed
    }

    verify_transfer(g, 15, Backend::ExactRational);
}

TEST_CASE("bumper shaft halves time offsets exactly") {
    Gadget g = make_time_mult_bumpers(Factor::Half, q(1), q(1), q(2), q(1));
    CHECK(g.declared[0].time.slope == q(1, 2));
    CHECK(g.declared[0].time.intercept == q(4));

    const Rational ds = g.input.offsets.hi / 2;
    const Rational entries[] = {q(0), q(1, 2), q(1), q(3, 2)};
    for (const Rational& ts : entries) {
        RunResult rr = run_through(g, ds, ts);
        REQUIRE(rr.outcome.kind == Outcome::Kind::Hit);
        CHECK(rr.outcome.time.rational() == ts / 2 + 4);
    }
    verify_transfer(g, 15, Backend::ExactRational);

    // the restoring pad would need to absorb the whole speed
    CHECK(code_of([] {
              make_time_mult_bumpers(Factor::Half, Rational(1), Rational(1), Rational(1),
                                     Rational(1));
          }) == ErrorCode::InvalidGadgetParams);
}

TEST_CASE("moving shaft multiplies time offsets to 1e-20") {
    Gadget g = make_time_mult_moving(Factor::Double, q(1), q(699));
    CHECK(g.declared[0].time.slope == q(2));
    CHECK(g.declared[0].time.intercept == q(701));
    CHECK_FALSE(g.exact_capable);
    CHECK(count_moving(g) == 2);

    CHECK(code_of([&] { verify_transfer(g, 5, Backend::ExactRational); }) ==
          ErrorCode::InvalidConfig);

    VerifyReport rep = verify_transfer(g, 5, Backend::BigFloatBackend);
    CHECK(rep.samples == 5);
    CHECK(rep.max_time_residual <= 1e-20);

    // ramp peaks at 1/702, return crawls at the same rate: a 1/500 cap holds
    const auto& wall = moving_by_id(g, "wall-a");
    validate_wall_speed_cap(wall, q(1, 500) * q(1, 500), ErrorCode::InvalidGadgetParams,
                            "cap-check");
    CHECK(code_of([&] {
              validate_wall_speed_cap(wall, q(1, 800) * q(1, 800),
                                      ErrorCode::InvalidGadgetParams, "cap-check");
          }) == ErrorCode::InvalidGadgetParams);

    CHECK(code_of([] { make_time_mult_moving(Factor::Double, Rational(1), Rational(1) / 2); }) ==
          ErrorCode::InvalidGadgetParams);
}

TEST_CASE("moving shaft: halving variant") {
    Gadget g = make_time_mult_moving(Factor::Half, q(1), q(699));
    CHECK(g.declared[0].time.slope == q(1, 2));
    VerifyReport rep = verify_transfer(g, 5, Backend::BigFloatBackend);
    CHECK(rep.max_time_residual <= 1e-20);
}

TEST_CASE("separator routes early and late windows to different ports") {
    Gadget g = make_time_separator(q(1, 100), q(1, 15), q(1));
    REQUIRE(g.outputs.size() == 2);
    REQUIRE(g.fragment.size() == 1);

    // slide rate 408/577 of the cap leaves the diagonal speed within 1/15
    const auto& mirror = std::get<MovingWallR>(g.fragment[0].shape);
    REQUIRE(mirror.schedule.phases.size() == 4);
    const auto& slide = mirror.schedule.phases[1].move.num.coeffs();
    REQUIRE(slide.size() == 2);
    CHECK(slide[1] == q(136, 2885));

    RunResult early = run_through(g, g.input.offsets.hi / 2, q(1, 4), 0);
    REQUIRE(early.outcome.kind == Outcome::Kind::Hit);
    REQUIRE(early.trace.events.size() == 1);
    CHECK(early.trace.events[0].kind == EventKind::MovingWallHit);

    RunResult late = run_through(g, g.input.offsets.hi / 2, q(5, 4), 1);
    REQUIRE(late.outcome.kind == Outcome::Kind::Hit);
    CHECK(late.trace.events.empty()); // the line is clear during the hold

    VerifyReport rep = verify_transfer(g, 16, Backend::ExactRational);
    CHECK(rep.routed[0] == 8);
    CHECK(rep.routed[1] == 8);

    CHECK(code_of([] { make_time_separator(Rational(1) / 4, Rational(1), Rational(1)); }) ==
          ErrorCode::InvalidGadgetParams);
    CHECK(code_of([] {
              make_time_separator(Rational(1) / 100, Rational(1) / 20, Rational(1));
          }) == ErrorCode::InvalidGadgetParams);
}

TEST_CASE("constant-speed shaft scales time and keeps the speed") {
    Gadget g = make_ray_time_mult(Factor::Double, q(1, 8), q(2), q(3));
    CHECK(g.ray_mode);
    CHECK(g.exact_capable);
    CHECK(count_moving(g) == 4); // (1+1/4)^3 * 128/125 = 2
    CHECK(g.declared[0].time.slope == q(2));

    // last stage absorbs the leftover factor 128/125: rate (m-1)/(m+1)
    const auto& last = moving_by_id(g, "floor-4");
    CHECK(last.schedule.phases[0].move.num.coeffs()[1] == q(3, 253));

    VerifyReport rep = verify_transfer(g, 9, Backend::ExactRational);
    CHECK(rep.samples == 9);

    Gadget h = make_ray_time_mult(Factor::Half, q(1, 8), q(4), q(4));
    CHECK(count_moving(h) == 3); // (7/9)^2 * 81/98 = 1/2
    CHECK(h.declared[0].time.slope == q(1, 2));
    const auto& hlast = moving_by_id(h, "floor-3");
    CHECK(hlast.schedule.phases[0].move.num.coeffs()[1] == q(-17, 179));
    verify_transfer(h, 9, Backend::ExactRational);
}

TEST_CASE("single-stage constant-speed doubler matches the closed form") {
    Gadget g = make_ray_time_mult(Factor::Double, q(1, 2), q(2), q(3));
    CHECK(count_moving(g) == 1);
    CHECK(g.declared[0].time.intercept == q(5));
    RunResult rr = run_through(g, g.input.offsets.hi / 2, q(1, 2));
    REQUIRE(rr.outcome.kind == Outcome::Kind::Hit);
    CHECK(rr.outcome.time.rational() == q(6)); // 2 * (1/2) + 5
    CHECK(dot(rr.final_state.vel, rr.final_state.vel).rational() == q(1));
    verify_transfer(g, 7, Backend::ExactRational);
}

TEST_CASE("catalog lists the construction set") {
    auto entries = gadget_catalog();
    CHECK(entries.size() >= 14);
    for (const auto& e : entries) {
        CHECK(!e.name.empty());
        CHECK(e.component_count >= 1);
        CHECK(!e.maps.empty());
    }
}
