#include "pinball/simulator.hpp"

#include <algorithm>
#include <type_traits>

#include "pinball/roots.hpp"

namespace pinball {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Reflect: return "reflect";
        case EventKind::Pass: return "pass";
        case EventKind::BumperHit: return "bumper";
        case EventKind::MovingWallHit: return "moving-wall";
    }
    return "unknown";
}

namespace {

// Hard cap on schedule periods walked per moving wall per event search; a
// tiny period together with a huge max_time would otherwise stall the run.
constexpr long max_period_windows = 1 << 20;

template <class S>
S conv(const Rational& q, mpfr_prec_t prec) {
    if constexpr (std::is_same_v<S, Rational>) {
        (void)prec;
        return q;
    } else {
        return BigFloat(q, prec);
    }
}

template <class S>
Vec<S> conv_vec(const VecR& v, mpfr_prec_t prec) {
    return {conv<S>(v.x, prec), conv<S>(v.y, prec)};
}

template <class S>
Poly<S> conv_poly(const Poly<Rational>& p, mpfr_prec_t prec) {
    std::vector<S> c;
    c.reserve(p.coeffs().size());
    for (const auto& q : p.coeffs()) c.push_back(conv<S>(q, prec));
    return Poly<S>(std::move(c));
}

template <class S>
RationalTimeFunction<S> conv_rtf(const RationalTimeFunction<Rational>& f, mpfr_prec_t prec) {
    return {conv_poly<S>(f.num, prec), conv_poly<S>(f.den, prec)};
}

template <class S>
ScheduleT<S> conv_schedule(const ScheduleT<Rational>& s, mpfr_prec_t prec) {
    ScheduleT<S> out;
    out.t_start = conv<S>(s.t_start, prec);
    out.period = conv<S>(s.period, prec);
    for (const auto& ph : s.phases)
        out.phases.push_back({conv<S>(ph.duration, prec), conv_rtf<S>(ph.move, prec)});
    return out;
}

long rational_floor_long(const Rational& q) {
    Rational f = rat_floor(q);
    mpz_class z = f.get_num();
    if (!z.fits_slong_p())
        fail(ErrorCode::InvalidConfig, "schedule window index out of range");
    return z.get_si();
}

// ---- conservative displacement range over one period (exact intervals) ----

struct QInterval {
    Rational lo, hi;
};

QInterval iv_add(const QInterval& a, const QInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

QInterval iv_mul(const QInterval& a, const QInterval& b) {
    Rational c0 = a.lo * b.lo, c1 = a.lo * b.hi, c2 = a.hi * b.lo, c3 = a.hi * b.hi;
    Rational lo = std::min(std::min(c0, c1), std::min(c2, c3));
    Rational hi = std::max(std::max(c0, c1), std::max(c2, c3));
    return {lo, hi};
}

QInterval iv_poly(const Poly<Rational>& p, const QInterval& t) {
    if (p.degree() < 0) return {Rational(0), Rational(0)};
    QInterval acc{p.leading(), p.leading()};
    for (long i = p.degree() - 1; i >= 0; --i) {
        acc = iv_mul(acc, t);
        const Rational& c = p.coeffs()[static_cast<size_t>(i)];
        acc = iv_add(acc, {c, c});
    }
    return acc;
}

std::optional<QInterval> rtf_range(const RationalTimeFunction<Rational>& f, const Rational& dur) {
    QInterval t{Rational(0), dur};
    QInterval num = iv_poly(f.num, t);
    QInterval den = iv_poly(f.den, t);
    if (sgn(den.lo) <= 0 && sgn(den.hi) >= 0) return std::nullopt;
    Rational c0 = num.lo / den.lo, c1 = num.lo / den.hi, c2 = num.hi / den.lo,
             c3 = num.hi / den.hi;
    return QInterval{std::min(std::min(c0, c1), std::min(c2, c3)),
                     std::max(std::max(c0, c1), std::max(c2, c3))};
}

// ---- prepared scene ----

struct MovingWallAnalysis {
    Rational k;          // cross(motion_dir, b - a): 0 means tangential sliding
    bool bounded = false;
    Rational disp_lo, disp_hi; // displacement range over a period when bounded
};

template <class S>
struct PrepMovingWall {
    MovingWallT<S> local;
    const MovingWallR* exact;
    MovingWallAnalysis an;
};

template <class S>
struct Prep {
    std::vector<std::string> ids;
    std::vector<std::variant<WallT<S>, ParabolaT<S>, OneWayGateT<S>, BumperT<S>, PrepMovingWall<S>>>
        shapes;
    Vec<S> target;
    S target_tol;
    S ghost; // events must happen after ball.time + ghost
    S tie;   // simultaneity window
    mpfr_prec_t prec = 256;
    bool ray_mode = false;
};

MovingWallAnalysis analyze_wall(const MovingWallR& w) {
    MovingWallAnalysis an;
    an.k = cross(w.motion_dir, w.b - w.a);
    an.bounded = true;
    bool first = true;
    for (const auto& ph : w.schedule.phases) {
        auto r = rtf_range(ph.move, ph.duration);
        if (!r) {
            an.bounded = false;
            break;
        }
        if (first) {
            an.disp_lo = r->lo;
            an.disp_hi = r->hi;
            first = false;
        } else {
            an.disp_lo = std::min(an.disp_lo, r->lo);
            an.disp_hi = std::max(an.disp_hi, r->hi);
        }
    }
    return an;
}

template <class S>
Prep<S> prepare(const Scene& scene) {
    Prep<S> ps;
    ps.prec = static_cast<mpfr_prec_t>(scene.precision_bits);
    ps.ray_mode = scene.ray_mode;
    ps.target = conv_vec<S>(scene.target, ps.prec);
    ps.target_tol = conv<S>(scene.target_tol, ps.prec);
    if constexpr (std::is_same_v<S, Rational>) {
        ps.ghost = Rational(0);
        ps.tie = Rational(0);
    } else {
        mpz_class g;
        mpz_ui_pow_ui(g.get_mpz_t(), 2, static_cast<unsigned long>(ps.prec / 2));
        ps.ghost = conv<S>(Rational(1) / Rational(g), ps.prec);
        mpz_class w;
        mpz_ui_pow_ui(w.get_mpz_t(), 10, 30);
        ps.tie = conv<S>(Rational(1) / Rational(w), ps.prec);
    }
    for (const auto& c : scene.components) {
        ps.ids.push_back(c.id);
        std::visit(
            [&](const auto& shape) {
                using T = std::decay_t<decltype(shape)>;
                if constexpr (std::is_same_v<T, WallR>) {
                    ps.shapes.emplace_back(WallT<S>{conv_vec<S>(shape.a, ps.prec),
                                                    conv_vec<S>(shape.b, ps.prec)});
                } else if constexpr (std::is_same_v<T, GateR>) {
                    ps.shapes.emplace_back(OneWayGateT<S>{conv_vec<S>(shape.start, ps.prec),
                                                          conv_vec<S>(shape.end, ps.prec)});
                } else if constexpr (std::is_same_v<T, ParabolaR>) {
                    ps.shapes.emplace_back(ParabolaT<S>{
                        conv<S>(shape.a, ps.prec), conv<S>(shape.b, ps.prec),
                        conv<S>(shape.c, ps.prec), conv<S>(shape.x0, ps.prec),
                        conv<S>(shape.x1, ps.prec)});
                } else if constexpr (std::is_same_v<T, BumperR>) {
                    BumperT<S> b;
                    b.a = conv_vec<S>(shape.a, ps.prec);
                    b.b = conv_vec<S>(shape.b, ps.prec);
                    b.sign = shape.sign;
                    b.t_start = conv<S>(shape.t_start, ps.prec);
                    b.t_active = conv<S>(shape.t_active, ps.prec);
                    b.period = conv<S>(shape.period, ps.prec);
                    b.accel = conv_rtf<S>(shape.accel, ps.prec);
                    ps.shapes.emplace_back(std::move(b));
                } else { // MovingWallR
                    PrepMovingWall<S> mw;
                    mw.local = MovingWallT<S>{conv_vec<S>(shape.a, ps.prec),
                                              conv_vec<S>(shape.b, ps.prec),
                                              conv_vec<S>(shape.motion_dir, ps.prec),
                                              conv_schedule<S>(shape.schedule, ps.prec)};
                    mw.exact = &shape;
                    mw.an = analyze_wall(shape);
                    ps.shapes.emplace_back(std::move(mw));
                }
            },
            c.shape);
    }
    return ps;
}

// ---- event search ----

template <class S>
struct Cand {
    S t;
    size_t idx;
    EventKind kind;
};

template <class S>
struct NextOut {
    std::optional<Cand<S>> cand;
    // true when some component may still be contacted past the horizon, so
    // "no candidate" must not be read as escape
    bool truncated = false;
};

// Roots of one schedule phase against the ball line, absolute-time window
// base_abs + [0, dur). Pushes the first admissible root as a candidate.
// Returns true when a candidate was found; sets truncated when an admissible
// root lies beyond the horizon.
template <class S>
bool phase_roots(const PrepMovingWall<S>& mw, size_t phase_idx, const Rational& base_abs,
                 const BallStateT<S>& ball, const S& tmin, const S& horizon, mpfr_prec_t prec,
                 const Rational& alpha, const Rational& beta, std::vector<Cand<S>>& cands,
                 bool& truncated, size_t idx) {
    const auto& exact_phase = mw.exact->schedule.phases[phase_idx];
    const Rational& k = mw.an.k;
    // contact equation: k * num(sigma) - (alpha + beta*(base_abs + sigma)) * den(sigma) = 0
    Rational c0 = alpha + beta * base_abs;
    Poly<Rational> shift({c0, beta});
    Poly<Rational> g = exact_phase.move.num * k - shift * exact_phase.move.den;
    Interval<Rational> dom{Rational(0), exact_phase.duration, true, false};

    if (g.is_zero()) fail(ErrorCode::DegenerateContact, "ball rides along a moving wall");
    std::vector<S> roots;
    if constexpr (std::is_same_v<S, Rational>) {
        roots = poly_roots_exact(g, dom, RootIsolationOptions{});
    } else {
        roots = poly_roots_bigfloat(g, dom, prec, RootIsolationOptions{});
    }

    S base_s = conv<S>(base_abs, prec);
    const auto& move_s = mw.local.schedule.phases[phase_idx].move;
    Vec<S> d = mw.local.b - mw.local.a;
    S dd = dot(d, d);
    for (const S& sigma : roots) {
        S t = base_s + sigma;
        if (!(t > tmin)) continue;
        if (t > horizon) {
            truncated = true;
            return false; // later roots are even later
        }
        S disp = move_s.eval(sigma);
        S dt = t - ball.time;
        Vec<S> pos = ball.pos + ball.vel * dt;
        Vec<S> rel = pos - (mw.local.a + mw.local.motion_dir * disp);
        S sp = dot(rel, d) / dd;
        int lo = scalar_sign(sp);
        int hi = scalar_sign(sp - scalar_like(1, sp));
        if (lo == 0 || hi == 0)
            fail(ErrorCode::DegenerateContact, "contact at a moving wall's endpoint");
        if (lo > 0 && hi < 0) {
            cands.push_back({t, idx, EventKind::MovingWallHit});
            return true;
        }
    }
    return false;
}

// Walks schedule windows j_lo..j_hi (absolute window j covers
// t_start + j*period + [0, period)). Returns true when a candidate was found.
template <class S>
bool walk_windows(const PrepMovingWall<S>& mw, long j_lo, long j_hi, const BallStateT<S>& ball,
                  const S& tmin, const S& horizon, mpfr_prec_t prec, const Rational& alpha,
                  const Rational& beta, std::vector<Cand<S>>& cands, bool& truncated,
                  size_t idx) {
    const auto& sched = mw.exact->schedule;
    if (j_hi - j_lo + 1 > max_period_windows)
        fail(ErrorCode::InvalidConfig,
             "moving-wall search would walk too many schedule periods; lower max_time");
    for (long j = j_lo; j <= j_hi; ++j) {
        Rational base = sched.t_start + Rational(j) * sched.period;
        Rational acc(0);
        for (size_t p = 0; p < sched.phases.size(); ++p) {
            bool found = phase_roots(mw, p, Rational(base + acc), ball, tmin, horizon, prec,
                                     alpha, beta, cands, truncated, idx);
            if (found) return true;
            if (truncated) return false;
            acc += sched.phases[p].duration;
        }
    }
    return false;
}

template <class S>
void moving_wall_candidate(const PrepMovingWall<S>& mw, const BallStateT<S>& ball, const S& tmin,
                           const S& horizon, mpfr_prec_t prec, std::vector<Cand<S>>& cands,
                           bool& truncated, size_t idx) {
    const MovingWallR& W = *mw.exact;
    // everything below runs on exact rationals (BigFloat state is dyadic)
    Rational px = scalar_exact(ball.pos.x), py = scalar_exact(ball.pos.y);
    Rational vx = scalar_exact(ball.vel.x), vy = scalar_exact(ball.vel.y);
    Rational t0 = scalar_exact(ball.time);
    Rational tmin_q = scalar_exact(tmin);
    Rational hor_q = scalar_exact(horizon);

    VecR d = W.b - W.a;
    Rational beta = vx * d.y - vy * d.x;                          // cross(vel, d)
    Rational ca = (px - W.a.x) * d.y - (py - W.a.y) * d.x;        // cross(pos - a, d)
    Rational alpha = ca - t0 * beta;                              // A(t) = alpha + beta t
    const Rational& k = mw.an.k;

    auto line_crossing_member = [&](const Rational& tq) -> bool {
        // exact membership of the line crossing against the displaced segment
        auto [disp, wv] = wall_state_at(W, tq);
        (void)wv;
        VecR pos{px + (tq - t0) * vx, py + (tq - t0) * vy};
        VecR rel = pos - (W.a + W.motion_dir * disp);
        Rational sp = dot(rel, d) / dot(d, d);
        if (sgn(sp) == 0 || sp == 1)
            fail(ErrorCode::DegenerateContact, "contact at a moving wall's endpoint");
        return sgn(sp) > 0 && sp < 1;
    };

    if (sgn(k) == 0) {
        // tangential slide: the wall's line never moves, so the ball crosses
        // it at most once
        if (sgn(beta) == 0) {
            if (sgn(ca) == 0)
                fail(ErrorCode::DegenerateContact, "ball rides along a moving wall");
            return;
        }
        Rational tq = -alpha / beta;
        if (!(tq > tmin_q)) return;
        if (tq > hor_q) {
            truncated = true;
            return;
        }
        if (line_crossing_member(tq))
            cands.push_back({conv<S>(tq, prec), idx, EventKind::MovingWallHit});
        return;
    }

    // before t_start the wall rests at zero displacement
    if (t0 < W.schedule.t_start) {
        if (sgn(beta) == 0) {
            if (sgn(ca) == 0)
                fail(ErrorCode::DegenerateContact, "ball rides along a moving wall");
            // parallel flight: the rest era produces no crossing
        } else {
            Rational tq = -alpha / beta;
            if (tq > tmin_q && tq < W.schedule.t_start) {
                if (tq > hor_q) {
                    truncated = true;
                    return;
                }
                if (line_crossing_member(tq)) {
                    cands.push_back({conv<S>(tq, prec), idx, EventKind::MovingWallHit});
                    return;
                }
            }
        }
    }

    const Rational& base = W.schedule.t_start;
    const Rational& T = W.schedule.period;
    Rational lo = std::max(tmin_q, base);
    Rational hi = hor_q;

    if (sgn(beta) == 0) {
        // the contact equation repeats identically every period: one partial
        // plus one full window decide the matter forever
        if (mw.an.bounded) {
            Rational lam = ca / k;
            if (lam < mw.an.disp_lo || lam > mw.an.disp_hi) return;
        }
        if (lo > hi) {
            truncated = true;
            return;
        }
        long j0 = std::max(0L, rational_floor_long((lo - base) / T));
        walk_windows(mw, j0, j0 + 1, ball, tmin, horizon, prec, alpha, beta, cands, truncated,
                     idx);
        return;
    }

    bool beyond_proven = false;
    if (mw.an.bounded) {
        // contact needs (alpha + beta t)/k inside the displacement range
        Rational k_lo = k * mw.an.disp_lo, k_hi = k * mw.an.disp_hi;
        if (k_hi < k_lo) std::swap(k_lo, k_hi);
        Rational tA = (k_lo - alpha) / beta, tB = (k_hi - alpha) / beta;
        if (tB < tA) std::swap(tA, tB);
        if (tA > hor_q) {
            truncated = true; // the reachable band lies wholly beyond horizon
            return;
        }
        lo = std::max(lo, tA);
        if (tB < hi) {
            hi = tB;
            beyond_proven = true;
        }
        if (lo > hi) return; // band lies wholly in the past: never again
    }
    if (lo > hi) {
        truncated = true;
        return;
    }

    long j_lo = std::max(0L, rational_floor_long((lo - base) / T));
    long j_hi = std::max(j_lo, rational_floor_long((hi - base) / T));
    bool found = walk_windows(mw, j_lo, j_hi, ball, tmin, horizon, prec, alpha, beta, cands,
                              truncated, idx);
    if (!found && !truncated && !beyond_proven && hi == hor_q) {
        // searched up to the horizon without a proof of escape
        if (!mw.an.bounded) truncated = true;
    }
}

template <class S>
NextOut<S> find_next(const BallStateT<S>& ball, const Prep<S>& ps, const S& horizon) {
    NextOut<S> out;
    std::vector<Cand<S>> cands;
    S tmin = ball.time + ps.ghost;

    for (size_t i = 0; i < ps.shapes.size(); ++i) {
        auto push_static = [&](const std::optional<S>& t, EventKind kind) {
            if (!t) return;
            if (!(*t > tmin)) return;
            if (*t > horizon) {
                out.truncated = true;
                return;
            }
            cands.push_back({*t, i, kind});
        };
        std::visit(
            [&](const auto& shape) {
                using T = std::decay_t<decltype(shape)>;
                if constexpr (std::is_same_v<T, WallT<S>>) {
                    push_static(ray_segment_hit(ball, shape.a, shape.b), EventKind::Reflect);
                } else if constexpr (std::is_same_v<T, OneWayGateT<S>>) {
                    auto t = ray_segment_hit(ball, shape.start, shape.end);
                    if (t) {
                        Vec<S> n = rot90ccw(shape.end - shape.start);
                        EventKind kind = scalar_sign(dot(ball.vel, n)) < 0 ? EventKind::Pass
                                                                           : EventKind::Reflect;
                        push_static(t, kind);
                    }
                } else if constexpr (std::is_same_v<T, ParabolaT<S>>) {
                    auto h = ray_parabola_hit(ball, shape);
                    if (h) push_static(std::optional<S>(h->first), EventKind::Reflect);
                } else if constexpr (std::is_same_v<T, BumperT<S>>) {
                    push_static(ray_segment_hit(ball, shape.a, shape.b), EventKind::BumperHit);
                } else {
                    moving_wall_candidate(shape, ball, tmin, horizon, ps.prec, cands,
                                          out.truncated, i);
                }
            },
            ps.shapes[i]);
    }

    if (cands.empty()) return out;
    size_t best = 0;
    for (size_t i = 1; i < cands.size(); ++i)
        if (cands[i].t < cands[best].t) best = i;
    for (size_t i = 0; i < cands.size(); ++i) {
        if (i == best) continue;
        S gap = cands[i].t - cands[best].t;
        if (scalar_abs(gap) <= ps.tie)
            fail(ErrorCode::SimultaneousContact,
                 "simultaneous contacts on '" + ps.ids[cands[best].idx] + "' and '" +
                     ps.ids[cands[i].idx] + "'");
    }
    out.cand = cands[best];
    return out;
}

// ---- responses ----

template <class S>
void check_interior(const Vec<S>& pt, const Vec<S>& a, const Vec<S>& b, const char* what) {
    Vec<S> d = b - a;
    S sp = dot(pt - a, d) / dot(d, d);
    if (scalar_sign(sp) == 0 || scalar_sign(sp - scalar_like(1, sp)) == 0)
        fail(ErrorCode::DegenerateContact, std::string("contact at the endpoint of a ") + what);
}

template <class S>
BallStateT<S> apply_event(const BallStateT<S>& ball, const Cand<S>& c, const Prep<S>& ps) {
    S dt = c.t - ball.time;
    Vec<S> pt = ball.pos + ball.vel * dt;
    BallStateT<S> nb{pt, ball.vel, c.t};
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, WallT<S>>) {
                check_interior(pt, shape.a, shape.b, "wall");
                nb.vel = respond_wall(ball.vel, shape);
            } else if constexpr (std::is_same_v<T, OneWayGateT<S>>) {
                check_interior(pt, shape.start, shape.end, "gate");
                nb.vel = respond_gate(ball.vel, shape).v;
            } else if constexpr (std::is_same_v<T, ParabolaT<S>>) {
                if (pt.x == shape.x0 || pt.x == shape.x1)
                    fail(ErrorCode::DegenerateContact, "contact at the edge of a parabola arc");
                Vec<S> n = parabola_normal(shape, pt.x);
                if (scalar_sign(dot(ball.vel, n)) == 0)
                    fail(ErrorCode::DegenerateContact, "grazing contact with a parabola");
                nb.vel = reflect(ball.vel, n);
            } else if constexpr (std::is_same_v<T, BumperT<S>>) {
                check_interior(pt, shape.a, shape.b, "bumper");
                nb.vel = respond_bumper(ball.vel, shape, c.t);
            } else {
                // membership (incl. endpoint degeneracy) was settled during
                // the search at the exact displaced position
                Vec<S> n = rot90ccw(shape.local.b - shape.local.a);
                if (ps.ray_mode) {
                    // constant-speed model: the mirror's motion shifts the
                    // contact point but never the speed
                    Vec<S> rel = ball.vel;
                    if (scalar_sign(dot(rel, n)) == 0)
                        fail(ErrorCode::DegenerateContact,
                             "grazing contact with a moving wall");
                    nb.vel = reflect(ball.vel, n);
                } else {
                    auto [disp, wvel] = wall_state_at(shape.local, c.t);
                    (void)disp;
                    nb.vel = respond_moving_wall(ball.vel, wvel, n);
                }
            }
        },
        ps.shapes[c.idx]);
    return nb;
}

// ---- run loop ----

template <class S>
Event to_boundary(const Cand<S>& c, const Vec<S>& pt, const Prep<S>& ps) {
    return Event{Scalar(c.t), ps.ids[c.idx], Scalar(pt.x), Scalar(pt.y), c.kind};
}

template <class S>
RunResult engine_run(const Scene& scene, const BallR& b0, long max_events,
                     const Rational& max_time) {
    Prep<S> ps = prepare<S>(scene);
    mpfr_prec_t prec = ps.prec;
    BallStateT<S> ball{conv_vec<S>(b0.pos, prec), conv_vec<S>(b0.vel, prec),
                       conv<S>(b0.time, prec)};
    S horizon = conv<S>(max_time, prec);

    RunResult out;
    out.trace.initial = b0;
    auto snap = [&](const BallStateT<S>& st) {
        out.final_state = {{Scalar(st.pos.x), Scalar(st.pos.y)},
                           {Scalar(st.vel.x), Scalar(st.vel.y)},
                           Scalar(st.time)};
    };

    if (!(ball.time < horizon)) {
        out.outcome = {Outcome::Kind::BoundExhausted, Scalar(ball.time), 0};
        snap(ball);
        return out;
    }

    for (;;) {
        NextOut<S> ne = find_next(ball, ps, horizon);
        S seg_end = ne.cand ? ne.cand->t : horizon;

        if (seg_end > ball.time) {
            S seg_dt = seg_end - ball.time;
            Vec<S> p1 = ball.pos + ball.vel * seg_dt;
            auto lam = target_on_segment<S>(ball.pos, p1, ps.target, ps.target_tol);
            if (lam) {
                S t_hit = ball.time + *lam * seg_dt;
                out.outcome = {Outcome::Kind::Hit, Scalar(t_hit),
                               static_cast<long>(out.trace.events.size())};
                S hit_dt = t_hit - ball.time;
                snap({ball.pos + ball.vel * hit_dt, ball.vel, t_hit});
                return out;
            }
        }

        if (!ne.cand) {
            if (ne.truncated) {
                out.outcome = {Outcome::Kind::BoundExhausted, Scalar(horizon),
                               static_cast<long>(out.trace.events.size())};
                S end_dt = horizon - ball.time;
                snap({ball.pos + ball.vel * end_dt, ball.vel, horizon});
            } else {
                out.outcome = {Outcome::Kind::Escaped, Scalar(ball.time),
                               static_cast<long>(out.trace.events.size())};
                snap(ball);
            }
            return out;
        }

        BallStateT<S> nb = apply_event(ball, *ne.cand, ps);
        out.trace.events.push_back(to_boundary(*ne.cand, nb.pos, ps));
        if (ne.cand->kind != EventKind::Pass) ++out.reflections;
        ball = nb;

        if (static_cast<long>(out.trace.events.size()) >= max_events) {
            out.outcome = {Outcome::Kind::BoundExhausted, Scalar(ball.time),
                           static_cast<long>(out.trace.events.size())};
            snap(ball);
            return out;
        }
    }
}

} // namespace

template <class S>
std::optional<S> target_on_segment(const Vec<S>& p0, const Vec<S>& p1, const Vec<S>& target,
                                   const S& tol) {
    Vec<S> d = p1 - p0;
    if (is_zero_vec(d)) fail(ErrorCode::InvalidGeometry, "target_on_segment: p0 == p1");
    if constexpr (std::is_same_v<S, Rational>) {
        (void)tol;
        if (sgn(cross(target - p0, d)) != 0) return std::nullopt;
        Rational lam = dot(target - p0, d) / dot(d, d);
        if (sgn(lam) < 0 || lam > 1) return std::nullopt;
        return lam;
    } else {
        S lam = dot(target - p0, d) / dot(d, d);
        S zero = scalar_like(0, lam), one = scalar_like(1, lam);
        if (lam < zero) lam = zero;
        if (lam > one) lam = one;
        Vec<S> q = p0 + d * lam;
        Vec<S> r = target - q;
        if (dot(r, r) <= tol * tol) return lam;
        return std::nullopt;
    }
}

template std::optional<Rational> target_on_segment<Rational>(const Vec<Rational>&,
                                                             const Vec<Rational>&,
                                                             const Vec<Rational>&,
                                                             const Rational&);
template std::optional<BigFloat> target_on_segment<BigFloat>(const Vec<BigFloat>&,
                                                             const Vec<BigFloat>&,
                                                             const Vec<BigFloat>&,
                                                             const BigFloat&);

RunResult run(const Scene& s, const BallR& b0, long max_events, const Rational& max_time) {
    if (max_events < 1) fail(ErrorCode::InvalidConfig, "max_events must be at least 1");
    if (sgn(max_time) <= 0) fail(ErrorCode::InvalidConfig, "max_time must be positive");
    if (is_zero_vec(b0.vel)) fail(ErrorCode::InvalidScene, "ball velocity must be nonzero");
    if (s.backend == Backend::ExactRational) return engine_run<Rational>(s, b0, max_events, max_time);
    return engine_run<BigFloat>(s, b0, max_events, max_time);
}

std::optional<Event> next_event(const BallR& b, const Scene& s, const Rational& horizon) {
    if (is_zero_vec(b.vel)) fail(ErrorCode::InvalidScene, "ball velocity must be nonzero");
    if (s.backend == Backend::ExactRational) {
        Prep<Rational> ps = prepare<Rational>(s);
        BallStateT<Rational> ball{b.pos, b.vel, b.time};
        auto ne = find_next(ball, ps, horizon);
        if (!ne.cand) return std::nullopt;
        Rational dt = ne.cand->t - ball.time;
        Vec<Rational> pt = ball.pos + ball.vel * dt;
        return to_boundary(*ne.cand, pt, ps);
    }
    Prep<BigFloat> ps = prepare<BigFloat>(s);
    mpfr_prec_t prec = ps.prec;
    BallStateT<BigFloat> ball{conv_vec<BigFloat>(b.pos, prec), conv_vec<BigFloat>(b.vel, prec),
                              conv<BigFloat>(b.time, prec)};
    auto ne = find_next(ball, ps, conv<BigFloat>(horizon, prec));
    if (!ne.cand) return std::nullopt;
    BigFloat dt = ne.cand->t - ball.time;
    Vec<BigFloat> pt = ball.pos + ball.vel * dt;
    return to_boundary(*ne.cand, pt, ps);
}

} // namespace pinball
