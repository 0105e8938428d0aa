#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pinball/geometry.hpp"
#include "pinball/poly.hpp"

namespace pinball {

template <class S>
struct WallT {
    Vec<S> a, b;
};

// Directional wall: transparent from the pass side, reflective from the
// blocking side. With d = end - start and n = rot90ccw(d), the ball passes
// iff v.n < 0 (the side n points away from blocks).
template <class S>
struct OneWayGateT {
    Vec<S> start, end;
};

// One piece of a periodic motion: displacement as a rational function of
// local time on [0, duration). The two-interval (move, dwell) schedule is the
// special case with two phases; the separator needs four.
template <class S>
struct SchedulePhaseT {
    S duration{};
    RationalTimeFunction<S> move;
};

template <class S>
struct ScheduleT {
    S t_start{};
    std::vector<SchedulePhaseT<S>> phases;
    S period{}; // = sum of phase durations; validated at load

    // (phase index, local time within phase) for local time tau in [0, period)
    std::pair<size_t, S> locate(const S& tau) const {
        S acc = scalar_like(0, tau);
        for (size_t i = 0; i < phases.size(); ++i) {
            S next = acc + phases[i].duration;
            if (tau < next || i + 1 == phases.size()) return {i, tau - acc};
            acc = next;
        }
        fail(ErrorCode::InvalidGeometry, "schedule has no phases");
    }
};

// Translating wall. motion_dir is any nonzero rational vector (unit 45-degree
// vectors are irrational, so unit length is not required); displacement is
// measured in multiples of motion_dir.
template <class S>
struct MovingWallT {
    Vec<S> a, b;
    Vec<S> motion_dir;
    ScheduleT<S> schedule;
};

// Retroreflecting wall with a time-scheduled speed effect. The effect applies
// on local time [0, t_active) within each period; `sign` folds the
// speed-up/slow-down direction into the effect.
template <class S>
struct BumperT {
    Vec<S> a, b;
    int sign = 1;
    S t_start{};
    S t_active{};
    S period{};
    RationalTimeFunction<S> accel;
};

template <class S>
Vec<S> respond_wall(const Vec<S>& v, const WallT<S>& w) {
    Vec<S> n = rot90ccw(w.b - w.a);
    if (scalar_sign(dot(v, n)) == 0)
        fail(ErrorCode::DegenerateContact, "grazing contact: velocity parallel to wall");
    return reflect(v, n);
}

template <class S>
struct GateResponse {
    bool passed;
    Vec<S> v;
};

template <class S>
GateResponse<S> respond_gate(const Vec<S>& v, const OneWayGateT<S>& g) {
    Vec<S> n = rot90ccw(g.end - g.start);
    int side = scalar_sign(dot(v, n));
    if (side == 0)
        fail(ErrorCode::DegenerateContact, "grazing contact: velocity parallel to gate");
    if (side < 0) return {true, v};
    return {false, reflect(v, n)};
}

// Elastic reflection in the wall's instantaneous rest frame:
// v''' = reflect(v - w, n) + w.
template <class S>
Vec<S> respond_moving_wall(const Vec<S>& v, const Vec<S>& wall_velocity, const Vec<S>& n) {
    Vec<S> rel = v - wall_velocity;
    if (scalar_sign(dot(rel, n)) == 0)
        fail(ErrorCode::DegenerateContact, "ball not approaching the wall in its rest frame");
    return reflect(rel, n) + wall_velocity;
}

// (displacement along motion_dir, wall velocity) at absolute time t.
template <class S>
std::pair<S, Vec<S>> wall_state_at(const MovingWallT<S>& m, const S& t) {
    S zero = scalar_like(0, t);
    if (t < m.schedule.t_start) return {zero, Vec<S>{zero, zero}};
    S local = t - m.schedule.t_start;
    S tau = local - scalar_floor(local / m.schedule.period) * m.schedule.period;
    auto [idx, sigma] = m.schedule.locate(tau);
    const auto& fn = m.schedule.phases[idx].move;
    S disp = fn.eval(sigma);
    S vel = fn.derivative().eval(sigma);
    return {disp, m.motion_dir * vel};
}

template <class S>
S bumper_effect(const BumperT<S>& bp, const S& t) {
    S zero = scalar_like(0, t);
    if (t < bp.t_start) return zero;
    S local = t - bp.t_start;
    S tau = local - scalar_floor(local / bp.period) * bp.period;
    if (!(tau < bp.t_active)) return zero;
    S eff = tau * bp.accel.eval(tau);
    return bp.sign < 0 ? -eff : eff;
}

// Retroreflection with speed change: direction exactly reversed, magnitude
// |v| + effect. Decelerating past zero is a terminal error.
template <class S>
Vec<S> respond_bumper(const Vec<S>& v, const BumperT<S>& bp, const S& t) {
    S speed = scalar_sqrt_or_fail(dot(v, v));
    S out = speed + bumper_effect(bp, t);
    if (scalar_sign(out) <= 0)
        fail(ErrorCode::BallStopped, "bumper absorbed the ball's entire speed");
    S scale = out / speed;
    return {-v.x * scale, -v.y * scale};
}

// Load-time validation on the exact source data. `where` names the offending
// component in diagnostics; `on_violation` lets gadget constructors report
// InvalidGadgetParams while the scene loader reports InvalidScene.
void validate_time_function(const RationalTimeFunction<Rational>& f, const Rational& lo,
                            const Rational& hi, const std::string& where);
void validate_schedule(const ScheduleT<Rational>& s, const std::string& where);
void validate_wall_speed_cap(const MovingWallT<Rational>& m, const Rational& cap_sq,
                             ErrorCode on_violation, const std::string& where);
void validate_bumper(const BumperT<Rational>& bp, const std::string& where);

} // namespace pinball
