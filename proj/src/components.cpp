#include "pinball/components.hpp"

#include "pinball/roots.hpp"

namespace pinball {

namespace {

Poly<Rational> derivative_numerator(const RationalTimeFunction<Rational>& f) {
    // numerator of f' over den^2
    return f.num.derivative() * f.den - f.num * f.den.derivative();
}

void check_degree(const Poly<Rational>& p, const std::string& where, const char* part) {
    if (p.degree() > schedule_degree_cap)
        fail(ErrorCode::InvalidScene,
             where + ": " + part + " degree " + std::to_string(p.degree()) +
                 " exceeds the cap of " + std::to_string(schedule_degree_cap));
}

} // namespace

void validate_time_function(const RationalTimeFunction<Rational>& f, const Rational& lo,
                            const Rational& hi, const std::string& where) {
    check_degree(f.num, where, "numerator");
    check_degree(f.den, where, "denominator");
    if (f.den.degree() < 0)
        fail(ErrorCode::InvalidScene, where + ": denominator is identically zero");
    if (poly_count_roots(f.den, make_interval(lo, hi, true, true)) != 0)
        fail(ErrorCode::InvalidScene, where + ": denominator has a zero inside the time domain");
}

void validate_schedule(const ScheduleT<Rational>& s, const std::string& where) {
    if (s.phases.empty())
        fail(ErrorCode::InvalidScene, where + ": schedule has no phases");
    if (sgn(s.period) <= 0)
        fail(ErrorCode::InvalidScene, where + ": schedule period must be positive");

    Rational total(0);
    for (size_t i = 0; i < s.phases.size(); ++i) {
        const auto& ph = s.phases[i];
        if (sgn(ph.duration) <= 0)
            fail(ErrorCode::InvalidScene,
                 where + ": phase " + std::to_string(i) + " duration must be positive");
        validate_time_function(ph.move, Rational(0), ph.duration,
                               where + " phase " + std::to_string(i));
        total += ph.duration;
    }
    if (total != s.period)
        fail(ErrorCode::InvalidScene, where + ": phase durations do not sum to the period");

    // Displacement must be continuous across phase boundaries and return to
    // zero at the period's end, so the motion has no teleports.
    Rational at = s.phases.front().move.eval(Rational(0));
    if (sgn(at) != 0)
        fail(ErrorCode::InvalidScene, where + ": displacement must start at zero");
    for (size_t i = 0; i < s.phases.size(); ++i) {
        Rational end = s.phases[i].move.eval(s.phases[i].duration);
        Rational next = (i + 1 < s.phases.size())
                            ? s.phases[i + 1].move.eval(Rational(0))
                            : Rational(0);
        if (end != next)
            fail(ErrorCode::InvalidScene,
                 where + ": displacement jumps at the end of phase " + std::to_string(i));
    }
}

void validate_wall_speed_cap(const MovingWallT<Rational>& m, const Rational& cap_sq,
                             ErrorCode on_violation, const std::string& where) {
    Rational dir_sq = dot(m.motion_dir, m.motion_dir);
    for (size_t i = 0; i < m.schedule.phases.size(); ++i) {
        const auto& ph = m.schedule.phases[i];
        Poly<Rational> w = derivative_numerator(ph.move);
        Poly<Rational> den2 = ph.move.den * ph.move.den;
        // |wall velocity|^2 = (w/den^2)^2 * |dir|^2 <= cap_sq, cleared of
        // denominators (den^4 > 0 on the domain).
        Poly<Rational> g = den2 * den2 * cap_sq - w * w * dir_sq;
        if (!poly_nonnegative_on(g, Rational(0), ph.duration))
            fail(on_violation,
                 where + ": wall speed exceeds the cap during phase " + std::to_string(i));
    }
}

void validate_bumper(const BumperT<Rational>& bp, const std::string& where) {
    if (bp.a == bp.b)
        fail(ErrorCode::InvalidScene, where + ": bumper segment is degenerate");
    if (bp.sign != 1 && bp.sign != -1)
        fail(ErrorCode::InvalidScene, where + ": bumper sign must be +1 or -1");
    if (sgn(bp.period) <= 0)
        fail(ErrorCode::InvalidScene, where + ": bumper period must be positive");
    if (sgn(bp.t_active) <= 0 || bp.t_active > bp.period)
        fail(ErrorCode::InvalidScene,
             where + ": active window must lie within (0, period]");
    validate_time_function(bp.accel, Rational(0), bp.t_active, where);
    // The speed-change magnitude tau * a(tau) may not go negative while the
    // bumper is on; the sign field alone decides accelerate vs decelerate.
    Poly<Rational> t({Rational(0), Rational(1)});
    if (!poly_nonnegative_on(t * bp.accel.num * bp.accel.den, Rational(0), bp.t_active))
        fail(ErrorCode::InvalidScene,
             where + ": effect magnitude goes negative during the active window");
}

} // namespace pinball
