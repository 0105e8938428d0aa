#include "pinball/gadgets.hpp"

#include <algorithm>
#include <set>

#include "pinball/simulator.hpp"

namespace pinball {

namespace {

using R = Rational;

VecR at(R x, R y) { return VecR{std::move(x), std::move(y)}; }

Component wall_c(std::string id, R x1, R y1, R x2, R y2) {
    return Component{std::move(id), WallR{at(std::move(x1), std::move(y1)),
                                          at(std::move(x2), std::move(y2))}};
}

Component gate_c(std::string id, R sx, R sy, R ex, R ey) {
    return Component{std::move(id), GateR{at(std::move(sx), std::move(sy)),
                                          at(std::move(ex), std::move(ey))}};
}

Component para_c(std::string id, R a, R b, R c, R x0, R x1) {
    return Component{std::move(id), ParabolaR{std::move(a), std::move(b), std::move(c),
                                              std::move(x0), std::move(x1)}};
}

Poly<R> poly(std::vector<R> coeffs) { return Poly<R>(std::move(coeffs)); }

RationalTimeFunction<R> rtf(std::vector<R> num) {
    return RationalTimeFunction<R>{poly(std::move(num)), Poly<R>::constant(R(1))};
}

RationalTimeFunction<R> rtf2(std::vector<R> num, std::vector<R> den) {
    return RationalTimeFunction<R>{poly(std::move(num)), poly(std::move(den))};
}

Interval<R> iv(R lo, R hi, bool lc = true, bool hc = false) {
    return make_interval(std::move(lo), std::move(hi), lc, hc);
}

R pow10(unsigned k) {
    mpz_class n;
    mpz_ui_pow_ui(n.get_mpz_t(), 10, k);
    return R(1) / R(n);
}

Port make_port(VecR base, VecR axis, VecR inward, R time_base, Interval<R> offsets) {
    Port p;
    p.base = base;
    p.axis = axis;
    p.seg_a = base + axis * offsets.lo;
    p.seg_b = base + axis * offsets.hi;
    p.inward = std::move(inward);
    p.time_base = std::move(time_base);
    p.offsets = std::move(offsets);
    return p;
}

Interval<R> image_interval(const AffineMap1D& m, const Interval<R>& in) {
    R lo = m.slope * in.lo + m.intercept;
    R hi = m.slope * in.hi + m.intercept;
    return Interval<R>{std::move(lo), std::move(hi), in.lo_closed, in.hi_closed};
}

VecR translated_point(const VecR& p, const VecR& d) { return p + d; }

} // namespace

Component translated_component(Component c, const VecR& d) {
    std::visit(
        [&](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, WallR>) {
                s.a = translated_point(s.a, d);
                s.b = translated_point(s.b, d);
            } else if constexpr (std::is_same_v<T, GateR>) {
                s.start = translated_point(s.start, d);
                s.end = translated_point(s.end, d);
            } else if constexpr (std::is_same_v<T, ParabolaR>) {
                // y = a x^2 + b x + c translated by (dx, dy)
                R dx = d.x;
                R nb = s.b - 2 * s.a * dx;
                R nc = s.a * dx * dx - s.b * dx + s.c + d.y;
                s.b = nb;
                s.c = nc;
                s.x0 = s.x0 + dx;
                s.x1 = s.x1 + dx;
            } else if constexpr (std::is_same_v<T, MovingWallR>) {
                s.a = translated_point(s.a, d);
                s.b = translated_point(s.b, d);
            } else if constexpr (std::is_same_v<T, BumperR>) {
                s.a = translated_point(s.a, d);
                s.b = translated_point(s.b, d);
            }
        },
        c.shape);
    return c;
}

void shift_component_clock(Component& c, const R& dt) {
    std::visit(
        [&](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MovingWallR>) {
                s.schedule.t_start = s.schedule.t_start + dt;
            } else if constexpr (std::is_same_v<T, BumperR>) {
                s.t_start = s.t_start + dt;
            }
        },
        c.shape);
}

Port translated_port(Port p, const VecR& d, const R& dt) {
    p.seg_a = translated_point(p.seg_a, d);
    p.seg_b = translated_point(p.seg_b, d);
    p.base = translated_point(p.base, d);
    p.time_base = p.time_base + dt;
    return p;
}

namespace {

bool fragment_has_moving(const std::vector<Component>& cs) {
    for (const auto& c : cs)
        if (std::holds_alternative<MovingWallR>(c.shape) ||
            std::holds_alternative<BumperR>(c.shape))
            return true;
    return false;
}

// Confocal parabola pair: entry curve y = x^2 on [0,2] and an exit curve
// opening downward around the shared focus (0, 1/4). A vertical ray entering
// at column s leaves vertically at column scale*s; path length is offset-free.
Gadget confocal_pair(std::string name, R a2, R c2, R x2_lo, R exit_y, R time_const,
                     R in_hi, R scale, R v) {
    if (v <= 0)
        fail(ErrorCode::InvalidGadgetParams, name + ": entry speed must be positive");
    Gadget g;
    g.name = std::move(name);
    g.entry_speed = v;
    g.fragment.push_back(para_c("curve-in", 1, 0, 0, 0, 2));
    g.fragment.push_back(para_c("curve-out", a2, 0, c2, x2_lo, 0));
    g.input = make_port(at(0, 5), at(1, 0), at(0, -1), 0, iv(0, in_hi));
    Interval<R> out_iv = iv(0, scale * in_hi);
    g.outputs.push_back(make_port(at(0, exit_y), at(-1, 0), at(0, -1), 0, out_iv));
    TransferMap tm;
    tm.space = {scale, 0};
    tm.time = {1, time_const / v};
    tm.reversing = true;
    g.declared.push_back(tm);
    g.time_windows.push_back(iv(0, 2));
    return g;
}

} // namespace

Gadget make_space_mult(Factor f, const R& v) {
    if (f == Factor::Half)
        return confocal_pair("space-mult-half", R(-2), R(3, 8), R(-1), R(-2), R(31, 4),
                             R(2), R(1, 2), v);
    // Exit arc cropped to the image of the entry interval: a longer arc would
    // hang over the reversing stage welded below, where shallow chords near
    // its exit vertex extend to an irrational crossing and stall the exact
    // backend even though a closer rational contact wins.
    return confocal_pair("space-mult-double", R(-1, 2), R(3, 4), R(-2), R(-8), R(29, 2),
                         R(1), R(2), v);
}

Gadget make_order_reverser(const R& v) {
    return confocal_pair("order-reverser", R(-1), R(1, 2), R(-2), R(-4), R(10), R(2), R(1), v);
}

Gadget restrict_input(Gadget g, const Interval<R>& offsets) {
    if (offsets.lo < g.input.offsets.lo || offsets.hi > g.input.offsets.hi)
        fail(ErrorCode::InvalidGadgetParams,
             g.name + ": restricted input interval is not a sub-interval");
    g.input.offsets = offsets;
    g.input.seg_a = g.input.base + g.input.axis * offsets.lo;
    g.input.seg_b = g.input.base + g.input.axis * offsets.hi;
    for (size_t i = 0; i < g.outputs.size(); ++i) {
        Interval<R> im = image_interval(g.declared[i].space, offsets);
        g.outputs[i].offsets = im;
        g.outputs[i].seg_a = g.outputs[i].base + g.outputs[i].axis * im.lo;
        g.outputs[i].seg_b = g.outputs[i].base + g.outputs[i].axis * im.hi;
    }
    return g;
}

Gadget compose(const Gadget& a, size_t out, const Gadget& b) {
    if (a.outputs.size() != 1 || out != 0)
        fail(ErrorCode::InvalidGadgetParams,
             "compose: upstream gadget must expose exactly one output");
    if (b.input_b)
        fail(ErrorCode::InvalidGadgetParams,
             "compose: cannot weld onto a two-input gadget");
    if (a.entry_speed != b.entry_speed)
        fail(ErrorCode::InvalidGadgetParams, "compose: entry speeds differ");
    if (a.ray_mode != b.ray_mode)
        fail(ErrorCode::InvalidGadgetParams, "compose: speed modes differ");

    const Port& pa = a.outputs[0];
    const Port& pb = b.input;
    if (pa.inward != pb.inward)
        fail(ErrorCode::InvalidGadgetParams, "compose: port travel directions differ");

    const AffineMap1D& sa = a.declared[0].space;
    const AffineMap1D& ta = a.declared[0].time;
    Interval<R> im = image_interval(sa, a.input.offsets);

    bool opposed;
    if (pa.axis == pb.axis)
        opposed = false;
    else if (pa.axis == -pb.axis)
        opposed = true;
    else
        fail(ErrorCode::InvalidGadgetParams, "compose: port lines are not parallel");

    R remap_c = 0; // offset remap for opposed ports: u = remap_c - o
    VecR delta;
    if (!opposed) {
        if (im.lo < pb.offsets.lo || im.hi > pb.offsets.hi)
            fail(ErrorCode::InvalidGadgetParams,
                 "compose: arrival offsets exceed the downstream input interval");
        delta = pa.base - pb.base;
    } else {
        remap_c = pb.offsets.lo + im.hi;
        if (pb.offsets.lo + (im.hi - im.lo) > pb.offsets.hi)
            fail(ErrorCode::InvalidGadgetParams,
                 "compose: arrival offsets exceed the downstream input interval");
        VecR weld = pa.base + pa.axis * remap_c;
        delta = weld - pb.base;
    }
    R tshift = pa.time_base + ta.intercept - pb.time_base;

    Gadget g;
    g.name = a.name + "+" + b.name;
    g.fragment = a.fragment;
    std::set<std::string> used;
    for (const auto& c : g.fragment) used.insert(c.id);
    for (const auto& c : b.fragment) {
        Component moved = translated_component(c, delta);
        shift_component_clock(moved, tshift);
        int n = 2;
        std::string id = moved.id;
        while (used.count(id)) id = moved.id + "-" + std::to_string(n++);
        moved.id = id;
        used.insert(id);
        g.fragment.push_back(std::move(moved));
    }
    g.input = a.input;
    g.input_b = a.input_b;
    g.entry_speed = a.entry_speed;
    g.ray_mode = a.ray_mode;
    g.exact_capable = a.exact_capable && b.exact_capable;
    g.speed_cap = std::min(a.speed_cap, b.speed_cap);
    g.time_windows = a.time_windows;

    for (size_t j = 0; j < b.outputs.size(); ++j) {
        Port po = translated_port(b.outputs[j], delta, tshift);
        const AffineMap1D& sb = b.declared[j].space;
        const AffineMap1D& tb = b.declared[j].time;
        TransferMap tm;
        tm.space.slope = sa.slope * sb.slope;
        tm.space.intercept = sb.slope * sa.intercept + sb.intercept;
        tm.time.slope = ta.slope * tb.slope;
        tm.time.intercept = tb.intercept;
        tm.reversing = a.declared[0].reversing != b.declared[j].reversing;
        if (opposed) {
            // The physical map on b's declared axis has negative slope; flip
            // the axis and re-base so the declared slope stays positive.
            R k = sb.slope * remap_c + 2 * sb.intercept;
            po.base = po.base + po.axis * k;
            po.axis = -po.axis;
        }
        Interval<R> oim = image_interval(tm.space, a.input.offsets);
        po.offsets = oim;
        po.seg_a = po.base + po.axis * oim.lo;
        po.seg_b = po.base + po.axis * oim.hi;
        g.outputs.push_back(std::move(po));
        g.declared.push_back(tm);
    }

    if (b.route) {
        R ms = sa.slope, cs = sa.intercept, mt = ta.slope;
        bool opp = opposed;
        R rc = remap_c;
        auto inner = b.route;
        g.route = [ms, cs, mt, opp, rc, inner](const R& s, const R& t) {
            R o = ms * s + cs;
            R u = opp ? R(rc - o) : o;
            R tt = mt * t;
            return inner(u, tt);
        };
    }
    return g;
}

Gadget compose(const Gadget& a, const Gadget& b) { return compose(a, 0, b); }

Gadget make_push(int bit, const R& v) {
    if (bit != 0 && bit != 1)
        fail(ErrorCode::InvalidGadgetParams, "make_push: bit must be 0 or 1");
    // A narrowed halving stage, with the exit arc cropped to match (see the
    // note in make_space_mult: stock arcs overhang the reverser below).
    Gadget half = confocal_pair("space-mult-half", R(-2), R(3, 8), R(-1, 2), R(-2),
                                R(31, 4), R(1), R(1, 2), v);
    Gadget g = compose(half, make_order_reverser(v));
    g.name = bit ? "push-1" : "push-0";
    if (bit == 1) {
        Port& po = g.outputs[0];
        po.base = po.base - po.axis * R(1, 2);
        g.declared[0].space.intercept = R(1, 2);
        Interval<R> oim = image_interval(g.declared[0].space, g.input.offsets);
        po.offsets = oim;
        po.seg_a = po.base + po.axis * oim.lo;
        po.seg_b = po.base + po.axis * oim.hi;
    }
    return g;
}

Gadget make_pop_space(const R& v) {
    Gadget dbl = restrict_input(make_space_mult(Factor::Double, v), iv(0, 1, false, false));
    Gadget g = compose(dbl, make_order_reverser(v));
    g.name = "pop-space";

    const Port wide = g.outputs[0];      // doubled beam, offsets 2s on axis +x
    const TransferMap base_map = g.declared[0];
    R bx = wide.base.x;
    R row = wide.base.y;
    R yf = row - 1;
    R yport = yf - 2;

    // Beam splitter: offsets in (1,2) turn right, (0,1) pass straight down.
    g.fragment.push_back(wall_c("split", bx + 1, yf, bx + 2, yf - 1));
    g.fragment.push_back(wall_c("turn", bx + 4, yf, bx + 5, yf - 1));

    g.outputs.clear();
    g.declared.clear();

    Port left = make_port(at(bx, yport), at(1, 0), at(0, -1), wide.time_base, iv(0, 1, false, false));
    TransferMap lm = base_map;
    lm.space = {2, 0};
    lm.time.intercept = base_map.time.intercept + R(3) / v;
    g.outputs.push_back(left);
    g.declared.push_back(lm);

    Port right = make_port(at(bx + 4, yport), at(1, 0), at(0, -1), wide.time_base,
                           iv(0, 1, false, false));
    TransferMap rm = base_map;
    rm.space = {2, -1};
    rm.time.intercept = base_map.time.intercept + R(6) / v;
    g.outputs.push_back(right);
    g.declared.push_back(rm);

    g.route = [](const R& s, const R&) -> size_t { return s > R(1, 2) ? 1 : 0; };
    return g;
}

Gadget make_delay(const R& d, const R& v) {
    if (d < 4)
        fail(ErrorCode::InvalidGeometry,
             "make_delay: supported delays are d >= 4 (got " + rat_to_string(d) + ")");
    if (v <= 0)
        fail(ErrorCode::InvalidGadgetParams, "make_delay: entry speed must be positive");
    R D = d / 2;
    Gadget g;
    g.name = "delay";
    g.entry_speed = v;
    g.fragment.push_back(wall_c("jog-a", 0, -1, 2, -3));
    g.fragment.push_back(wall_c("jog-b", D, -1, D + 2, -3));
    g.fragment.push_back(wall_c("jog-c", D, -6, D + 2, -4));
    g.fragment.push_back(wall_c("jog-d", 0, -6, 2, -4));
    g.input = make_port(at(0, 0), at(1, 0), at(0, -1), 0, iv(0, 2));
    g.outputs.push_back(make_port(at(0, -8), at(1, 0), at(0, -1), 0, iv(0, 2)));
    TransferMap tm;
    tm.space = {1, 0};
    tm.time = {1, (8 + d) / v};
    g.declared.push_back(tm);
    g.time_windows.push_back(iv(0, 2));
    return g;
}

Gadget make_rejoin(const R& v) {
    if (v <= 0)
        fail(ErrorCode::InvalidGadgetParams, "make_rejoin: entry speed must be positive");
    Gadget g;
    g.name = "rejoin";
    g.entry_speed = v;
    // Path A detours through a four-wall jog so that both entries cover
    // exactly 18 units before the shared exit line.
    g.fragment.push_back(wall_c("jog-a", 0, -1, 2, -3));
    g.fragment.push_back(wall_c("jog-b", 3, -1, 5, -3));
    g.fragment.push_back(wall_c("jog-c", 3, R(-11, 2), 5, R(-7, 2)));
    g.fragment.push_back(wall_c("jog-d", 0, R(-11, 2), 2, R(-7, 2)));
    g.fragment.push_back(gate_c("merge-gate", 0, -8, 2, -10));
    g.fragment.push_back(wall_c("turn-b", -6, -8, -4, -10));
    g.input = make_port(at(0, 0), at(1, 0), at(0, -1), 0, iv(0, 2));
    g.input_b = make_port(at(-6, 0), at(1, 0), at(0, -1), 0, iv(0, 2));
    g.outputs.push_back(make_port(at(0, -12), at(1, 0), at(0, -1), 0, iv(0, 2)));
    TransferMap tm;
    tm.space = {1, 0};
    tm.time = {1, R(18) / v};
    g.declared.push_back(tm);
    g.time_windows.push_back(iv(0, 2));
    return g;
}

namespace {

// Shared stub-shaft skeleton for the two-pad time multipliers: a descending
// column with a one-way gate over the first pad, a sideways run to a second
// gated stub, and a third gate turning the return run down to the exit.
struct Shaft {
    R w, m, c_r, l_x, y_l, x_o, y_out;
};

void emit_shaft_gates(Gadget& g, const Shaft& s) {
    // All three gates sit on the same diagonal band [c_r - w, c_r]: the
    // sideways run enters gate-out from the pass side and the return run
    // bounces off it, down to the exit.
    g.fragment.push_back(gate_c("gate-in", 0, s.c_r, s.w, s.c_r - s.w));
    g.fragment.push_back(
        gate_c("gate-far", -s.l_x - s.w, s.c_r - s.w, -s.l_x, s.c_r));
    g.fragment.push_back(gate_c("gate-out", s.x_o, s.c_r, s.x_o + s.w, s.c_r - s.w));
}

void finish_time_mult(Gadget& g, const Shaft& s, R slope, R intercept, R out_tb) {
    g.input = make_port(at(0, 0), at(1, 0), at(0, -1), 0, iv(0, s.w));
    g.outputs.push_back(
        make_port(at(s.x_o, s.y_out), at(1, 0), at(0, -1), std::move(out_tb), iv(0, s.w)));
    TransferMap tm;
    tm.space = {1, 0};
    tm.time = {std::move(slope), std::move(intercept)};
    g.declared.push_back(tm);
    g.time_windows.push_back(iv(0, 2));
}

} // namespace

Gadget make_time_mult_bumpers(Factor f, const R& v, const R& d1, const R& d2, const R& d3) {
    if (v <= 0 || d1 <= 0 || d2 <= 0 || d3 <= 0)
        fail(ErrorCode::InvalidGadgetParams,
             "make_time_mult_bumpers: v and leg lengths must be positive");
    if (f == Factor::Half && d2 < 2 * v)
        fail(ErrorCode::InvalidGadgetParams,
             "make_time_mult_bumpers: halving needs d2 >= 2v or the restoring pad "
             "would absorb more than the ball's speed");

    Shaft s;
    s.w = std::min(std::min(R(1), R(d1 / 4)), std::min(R(d2 / 8), R(d3 / 4)));
    s.m = s.w / 4;
    s.c_r = -d1 + 2 * s.w + s.m;
    s.l_x = d2 - 3 * s.w - 2 * s.m;
    s.y_l = s.c_r - s.w - s.m;
    s.x_o = -s.l_x + 2 * s.m;
    s.y_out = s.c_r + s.w + 3 * s.m - d3;

    Gadget g;
    g.name = f == Factor::Double ? "time-mult-bumpers-double" : "time-mult-bumpers-half";
    emit_shaft_gates(g, s);

    R v2 = v * v;
    BumperR pad_a;
    pad_a.a = at(-s.m, -d1);
    pad_a.b = at(s.w + s.m, -d1);
    pad_a.t_start = d1 / v;
    pad_a.t_active = 2;
    pad_a.period = 6;
    BumperR pad_b;
    pad_b.a = at(-s.l_x - s.w - s.m, s.y_l);
    pad_b.b = at(-s.l_x + s.m, s.y_l);
    pad_b.t_start = (d1 + d2) / v;
    // The effect magnitude is tau * accel(tau); a first contact at entry
    // offset tau retunes the speed so the leg to the second pad takes
    // d2/v +- tau, and the second pad undoes the change exactly.
    if (f == Factor::Double) {
        pad_a.sign = -1;
        pad_a.accel = rtf2({v2}, {d2, v});
        pad_b.sign = 1;
        pad_b.accel = rtf2({v2}, {2 * d2, v});
        pad_b.t_active = 4;
        pad_b.period = 8;
    } else {
        pad_a.sign = 1;
        pad_a.accel = rtf2({v2}, {2 * d2, -v});
        pad_b.sign = -1;
        pad_b.accel = rtf2({v2}, {d2, -v});
        pad_b.t_active = 1;
        pad_b.period = 5;
    }
    validate_bumper(pad_a, g.name + ".pad-a");
    validate_bumper(pad_b, g.name + ".pad-b");
    g.fragment.push_back(Component{"pad-a", pad_a});
    g.fragment.push_back(Component{"pad-b", pad_b});

    R slope = f == Factor::Double ? R(2) : R(1, 2);
    finish_time_mult(g, s, slope, (d1 + d2 + d3) / v, R(0));
    g.entry_speed = v;
    return g;
}

namespace {

// [4/4] Pade approximant of sqrt(1+x) about 0; agrees to O(x^9), which drives
// the transfer-time residual below 1e-20 for the leg lengths this gadget
// accepts.
const std::vector<R> pade_num = {R(1), R(9, 4), R(27, 16), R(15, 32), R(9, 256)};
const std::vector<R> pade_den = {R(1), R(7, 4), R(15, 16), R(5, 32), R(1, 256)};

Poly<R> poly_compose_scale(const std::vector<R>& coeffs, const R& beta) {
    std::vector<R> out;
    R p(1);
    for (const R& c : coeffs) {
        out.push_back(c * p);
        p = p * beta;
    }
    return poly(std::move(out));
}

// Receding-wall displacement in multiples of (0,-1):
//   A(t) = v t + (2L/(mu-1)) * (1 - sqrt(1 + (mu-1) v t / L))
// with sqrt replaced by its Pade approximant. Positive = receding (Double),
// negative = approaching (Half).
RationalTimeFunction<R> pade_ramp(const R& mu, const R& v, const R& L) {
    R beta = (mu - 1) * v / L;
    Poly<R> nb = poly_compose_scale(pade_num, beta);
    Poly<R> db = poly_compose_scale(pade_den, beta);
    Poly<R> lin = poly({R(0), v});
    R scale = 2 * L / (mu - 1);
    Poly<R> num = lin * db + (db - nb) * scale;
    return RationalTimeFunction<R>{num, db};
}

RationalTimeFunction<R> time_scaled(const RationalTimeFunction<R>& f, const R& outer,
                                    const R& arg) {
    // outer * f(arg * t)
    std::vector<R> num, den;
    R p(1);
    for (const R& c : f.num.coeffs()) {
        num.push_back(outer * c * p);
        p = p * arg;
    }
    p = R(1);
    for (const R& c : f.den.coeffs()) {
        den.push_back(c * p);
        p = p * arg;
    }
    return RationalTimeFunction<R>{poly(std::move(num)), poly(std::move(den))};
}

// ramp out, crawl back to rest at ret_rate (kept within the speed cap), then
// sit still long enough for every ball to leave the fragment.
ScheduleT<R> ramp_schedule(const R& t_start, const RationalTimeFunction<R>& ramp,
                           const R& ramp_dur, const R& ret_rate, const R& tail) {
    R disp_end = ramp.eval(ramp_dur);
    R ret_dur = abs(disp_end) / ret_rate;
    ScheduleT<R> sch;
    sch.t_start = t_start;
    sch.phases.push_back({ramp_dur, ramp});
    sch.phases.push_back({ret_dur, rtf({disp_end, -disp_end / ret_dur})});
    sch.phases.push_back({tail, rtf({R(0)})});
    sch.period = ramp_dur + ret_dur + tail;
    return sch;
}

} // namespace

Gadget make_time_mult_moving(Factor f, const R& v, const R& d2) {
    if (v <= 0 || d2 <= 0)
        fail(ErrorCode::InvalidGadgetParams, "make_time_mult_moving: v and d2 must be positive");
    R mu = f == Factor::Double ? R(2) : R(1, 2);
    R L = d2 + 2;
    if (d2 < 1 || L < 2 * v * v)
        fail(ErrorCode::InvalidGadgetParams,
             "make_time_mult_moving: d2 too short for unit moving intervals at this speed");

    R g1 = 1;
    Shaft s;
    s.w = R(1, 4);
    s.m = R(1, 16);
    s.c_r = -g1 + 2 * s.w + s.m;
    s.l_x = d2 + 1 - 3 * s.w - 2 * s.m;
    s.y_l = s.c_r - (1 + s.w + s.m);
    s.x_o = -s.l_x + 2 * s.m;
    s.y_out = s.y_l - 1;

    Gadget g;
    g.name = f == Factor::Double ? "time-mult-moving-double" : "time-mult-moving-half";
    emit_shaft_gates(g, s);

    RationalTimeFunction<R> ramp_a = pade_ramp(mu, v, L);
    R tau_a = 2 + (mu - 1) * v / L; // latest first-wall contact over entries in [0,2)
    RationalTimeFunction<R> ramp_b = time_scaled(ramp_a, mu, 1 / mu);
    R sigma_a = mu * tau_a;
    // Peak ramp speed; the return phase crawls back at the same rate so the
    // cap check binds at the ramp's end and nowhere else.
    R ret_rate = mu > 1 ? R(v * v / (L + v)) : R(v * v / (2 * L - v));

    MovingWallR wall_a;
    wall_a.a = at(-s.m, -g1);
    wall_a.b = at(s.w + s.m, -g1);
    wall_a.motion_dir = at(0, -1);
    wall_a.schedule = ramp_schedule(g1 / v, ramp_a, tau_a, ret_rate, R(64));
    MovingWallR wall_b;
    wall_b.a = at(-s.l_x - s.w - s.m, s.y_l);
    wall_b.b = at(-s.l_x + s.m, s.y_l);
    wall_b.motion_dir = at(0, 1);
    wall_b.schedule = ramp_schedule((g1 + L) / v, ramp_b, sigma_a, ret_rate, R(64));

    R cap_sq = (v / 10) * (v / 10);
    validate_wall_speed_cap(wall_a, cap_sq, ErrorCode::InvalidGadgetParams, g.name + ".wall-a");
    validate_wall_speed_cap(wall_b, cap_sq, ErrorCode::InvalidGadgetParams, g.name + ".wall-b");
    g.fragment.push_back(Component{"wall-a", wall_a});
    g.fragment.push_back(Component{"wall-b", wall_b});

    R x_g = 3 + 2 * s.w + 4 * s.m; // second contact -> exit, at rest
    finish_time_mult(g, s, mu, L / v, (g1 + x_g) / v);
    g.entry_speed = v;
    g.exact_capable = false; // contact times involve the Pade surd
    return g;
}

Gadget make_time_separator(const R& kappa, const R& eps, const R& v) {
    if (kappa <= 0 || kappa >= R(1, 4) || v <= 0)
        fail(ErrorCode::InvalidGadgetParams, "make_time_separator: need 0 < kappa < 1/4 and v > 0");
    R bound = 6 * kappa / (1 - 4 * kappa);
    if (eps < bound)
        fail(ErrorCode::InvalidGadgetParams,
             "make_time_separator: eps below 6*kappa/(1-4*kappa); the wall cannot clear "
             "its own footprint between windows");

    R w = std::min(R(kappa * v), R(1));
    R m = kappa * v / 2;
    // Slide rate along each axis; 408/577 approximates 1/sqrt(2) from below,
    // so the wall's speed (rate * sqrt 2) stays within eps * v exactly:
    // 2 * 408^2 = 332928 <= 577^2 = 332929.
    R q = eps * v * R(408, 577);
    R hold = R(1, 2) + 2 * kappa;
    R slide = R(1, 2) - 2 * kappa;
    R shift = q * slide;

    Gadget g;
    g.name = "time-separator";
    MovingWallR mirror;
    mirror.a = at(-m, -kappa * v + m);
    mirror.b = at(w + m, -kappa * v - w - m);
    mirror.motion_dir = at(1, -1);
    mirror.schedule.t_start = 0;
    mirror.schedule.phases.push_back({hold, rtf({R(0)})});
    mirror.schedule.phases.push_back({slide, rtf({R(0), q})});
    mirror.schedule.phases.push_back({hold, rtf({shift})});
    mirror.schedule.phases.push_back({slide, rtf({shift, -q})});
    mirror.schedule.period = 2;
    validate_wall_speed_cap(mirror, eps * v * eps * v, ErrorCode::InvalidGadgetParams,
                            g.name + ".mirror");
    g.fragment.push_back(Component{"mirror", mirror});

    g.input = make_port(at(0, 0), at(1, 0), at(0, -1), 0, iv(0, w));

    R x_e = w + 2 * m + shift;
    Port port_e = make_port(at(x_e, -kappa * v), at(0, -1), at(1, 0), 0, iv(0, w));
    TransferMap em;
    em.space = {1, 0};
    em.time = {1, kappa + x_e / v};
    g.outputs.push_back(port_e);
    g.declared.push_back(em);

    R y_l = -kappa * v - w - 2 * m - shift;
    Port port_l = make_port(at(0, y_l), at(1, 0), at(0, -1), 1, iv(0, w));
    TransferMap lm;
    lm.space = {1, 0};
    lm.time = {1, -y_l / v - 1};
    g.outputs.push_back(port_l);
    g.declared.push_back(lm);

    g.entry_speed = v;
    g.speed_cap = eps;
    g.time_windows.push_back(iv(0, R(1, 2)));
    g.time_windows.push_back(iv(1, R(3, 2)));
    g.route = [](const R&, const R& t) -> size_t { return t < 1 ? 0 : 1; };
    return g;
}

Gadget make_ray_time_mult(Factor f, const R& eps, const R& d1, const R& d2) {
    if (eps <= 0 || eps > R(1, 2))
        fail(ErrorCode::InvalidGadgetParams, "make_ray_time_mult: need 0 < eps <= 1/2");
    if (d1 <= 0 || d2 <= 0)
        fail(ErrorCode::InvalidGadgetParams, "make_ray_time_mult: legs must be positive");
    const R v(1); // schedules assume unit entry speed

    // Stage slopes m_k with product exactly 2 (or 1/2); each stage's wall
    // rate q_k = v (m_k - 1)/(m_k + 1) stays within eps * v.
    std::vector<R> slopes;
    if (f == Factor::Double) {
        R m_pre = 1 + 2 * eps;
        R acc(1);
        int k_min = 0;
        while (acc < 2) {
            acc = acc * m_pre;
            ++k_min;
        }
        R prev = acc / m_pre; // m_pre^(k_min-1)
        R inv = 1 / (2 * eps);
        mpz_class xi_z;
        mpz_cdiv_q(xi_z.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
        long xi = std::max(static_cast<long>(xi_z.get_si()), static_cast<long>(k_min));
        for (int i = 0; i < k_min - 1; ++i) slopes.push_back(m_pre);
        slopes.push_back(2 / prev);
        for (long i = k_min; i < xi; ++i) slopes.push_back(R(1));
    } else {
        R m_pre = (1 - eps) / (1 + eps);
        R acc(1);
        int k_min = 0;
        while (acc > R(1, 2)) {
            acc = acc * m_pre;
            ++k_min;
        }
        R prev = acc / m_pre;
        for (int i = 0; i < k_min - 1; ++i) slopes.push_back(m_pre);
        slopes.push_back(R(1, 2) / prev);
    }
    const size_t xi = slopes.size();

    R w = std::min(std::min(R(1), R(d1 / 4)), R(d2 / 4));
    R m = w / 4;
    R run = w + 4 * m;

    Gadget g;
    g.name = f == Factor::Double ? "ray-time-mult-double" : "ray-time-mult-half";
    g.ray_mode = true;
    g.speed_cap = eps;

    // Walk the stage stack, accumulating geometry and the zero-offset ball's
    // clock for each wall's schedule start.
    std::vector<R> q(xi), width(xi), depth(xi), c(xi), rest(xi), x(xi);
    R spread_in = 2; // entry time-offset spread
    for (size_t k = 0; k < xi; ++k) {
        const R& mk = slopes[k];
        q[k] = v * (mk - 1) / (mk + 1);
        width[k] = spread_in * v / (v - q[k]);
        spread_in = spread_in * mk;
        R rise = q[k] < 0 ? -q[k] * width[k] : R(0);
        depth[k] = w + 2 * m + rise;
        x[k] = -R(static_cast<long>(k)) * run;
    }
    c[0] = -d1 + depth[0];
    if (c[0] > -m)
        fail(ErrorCode::InvalidGadgetParams,
             "make_ray_time_mult: d1 too short for the first stage stub");
    rest[0] = -d1;
    for (size_t k = 1; k < xi; ++k) {
        R fall = q[k - 1] > 0 ? q[k - 1] * width[k - 1] : R(0);
        c[k] = rest[k - 1] - fall - 2 * m - w;
        rest[k] = c[k] - depth[k];
    }
    // The exit column sits one run left of the last stage, clear of its
    // wall, so the only demand on d2 is room below the last turn mirror.
    R y_out = c[xi - 1] - (d2 - depth[xi - 1] - run + w);
    if (c[xi - 1] - y_out <= w + m)
        fail(ErrorCode::InvalidGadgetParams,
             "make_ray_time_mult: d2 too short for the final stage stub");

    R theta = d1 / v;
    R total = d1;
    for (size_t k = 0; k < xi; ++k) {
        std::string tag = std::to_string(k + 1);
        g.fragment.push_back(
            gate_c("gate-" + tag, x[k], c[k], x[k] + w, c[k] - w));
        if (q[k] == 0) {
            g.fragment.push_back(
                wall_c("floor-" + tag, x[k] - m, rest[k], x[k] + w + m, rest[k]));
        } else {
            MovingWallR fl;
            fl.a = at(x[k] - m, rest[k]);
            fl.b = at(x[k] + w + m, rest[k]);
            fl.motion_dir = at(0, -1);
            ScheduleT<R> sch;
            sch.t_start = theta;
            sch.phases.push_back({width[k], rtf({R(0), q[k]})});
            R disp = q[k] * width[k];
            sch.phases.push_back({width[k], rtf({disp, -q[k]})});
            sch.phases.push_back({R(64), rtf({R(0)})});
            sch.period = 2 * width[k] + 64;
            fl.schedule = sch;
            validate_wall_speed_cap(fl, eps * v * eps * v, ErrorCode::InvalidGadgetParams,
                                    g.name + ".floor-" + tag);
            g.fragment.push_back(Component{"floor-" + tag, fl});
        }
        // Turn mirror back onto the next descent column.
        R xm = x[k] - run;
        g.fragment.push_back(wall_c("turn-" + tag, xm, c[k] - w, xm + w, c[k]));
        R leg = k + 1 < xi ? depth[k] + 4 * m + (c[k] - rest[k + 1])
                           : depth[k] + 4 * m + (c[k] - y_out);
        theta = theta + leg / v;
        total = total + leg;
    }

    g.input = make_port(at(0, 0), at(1, 0), at(0, -1), 0, iv(0, w));
    bool flipped = xi % 2 == 1;
    R x_exit = x[xi - 1] - run;
    Port out = flipped
                   ? make_port(at(x_exit + w, y_out), at(-1, 0), at(0, -1), 0, iv(0, w))
                   : make_port(at(x_exit, y_out), at(1, 0), at(0, -1), 0, iv(0, w));
    g.outputs.push_back(out);
    TransferMap tm;
    tm.space = {1, 0};
    tm.reversing = flipped;
    tm.time.slope = f == Factor::Double ? R(2) : R(1, 2);
    tm.time.intercept = total / v; // rest-path transit of the zero-offset ball
    g.declared.push_back(tm);
    g.time_windows.push_back(iv(0, 2));
    return g;
}

namespace {

R scalar_to_rational_checked(const Scalar& s) { return s.rational(); }

double scalar_to_double(const Scalar& s) {
    return s.is_rational() ? s.rational().get_d() : s.bigfloat().to_double();
}

struct SampleCheck {
    R space_off, time_off;
    size_t expect;
    const Port* in;
};

} // namespace

VerifyReport verify_transfer(const Gadget& g, int n_samples, Backend backend) {
    if (n_samples < 3)
        fail(ErrorCode::InvalidConfig, "verify_transfer: need at least 3 samples");
    if (backend == Backend::ExactRational && !g.exact_capable)
        fail(ErrorCode::InvalidConfig,
             g.name + ": contact times are irrational; verify under the big-float backend");
    if (g.outputs.empty() || g.outputs.size() != g.declared.size())
        fail(ErrorCode::InvalidGadgetParams, g.name + ": outputs and declared maps disagree");

    const bool exact = backend == Backend::ExactRational;
    const R v = g.entry_speed;
    const R tol_time = pow10(20);
    const R tol_speed2 = (2 * v + 1) * pow10(20);

    Scene base;
    base.backend = backend;
    base.precision_bits = 256;
    base.ray_mode = g.ray_mode;
    base.allow_exact_moving = fragment_has_moving(g.fragment);
    base.speed_cap_ratio = g.speed_cap;
    base.components = g.fragment;
    base.target_tol = pow10(24);

    std::vector<Interval<R>> windows =
        g.time_windows.empty() ? std::vector<Interval<R>>{iv(0, 2)} : g.time_windows;

    VerifyReport rep;
    rep.routed.assign(g.outputs.size(), 0);
    rep.reversing = g.declared[0].reversing;

    std::vector<SampleCheck> samples;
    for (int j = 0; j < n_samples; ++j) {
        R frac = R(j + 1) / R(n_samples + 1);
        const Interval<R>& sw = g.input.offsets;
        R s = sw.lo + (sw.hi - sw.lo) * frac;
        const Interval<R>& tw = windows[j % windows.size()];
        R t = tw.lo + (tw.hi - tw.lo) * frac;
        SampleCheck sc;
        sc.space_off = s;
        sc.time_off = t;
        sc.expect = g.route ? g.route(s, t) : 0;
        sc.in = (g.input_b && j % 2 == 1) ? &*g.input_b : &g.input;
        samples.push_back(std::move(sc));
    }

    bool validated = false;
    for (const SampleCheck& sc : samples) {
        const TransferMap& tm = g.declared[sc.expect];
        const Port& out = g.outputs[sc.expect];
        R o_exp = tm.space.slope * sc.space_off + tm.space.intercept;
        VecR target = out.base + out.axis * o_exp;
        R t_exp = out.time_base + tm.time.slope * sc.time_off + tm.time.intercept;

        Scene sc_scene = base;
        sc_scene.target = target;
        BallR ball;
        ball.pos = sc.in->base + sc.in->axis * sc.space_off;
        ball.vel = sc.in->inward * v;
        ball.time = sc.in->time_base + sc.time_off;
        sc_scene.ball = ball;
        if (!validated) {
            validate_scene(sc_scene); // schedule/cap checks are per-fragment, do them once
            validated = true;
        }

        R horizon = t_exp + 16;
        RunResult rr = run(sc_scene, ball, 192, horizon);
        if (rr.outcome.kind != Outcome::Kind::Hit) {
            // Diagnose: did the ball reach some other declared port instead?
            for (size_t k = 0; k < g.outputs.size(); ++k) {
                if (k == sc.expect) continue;
                R o_k = g.declared[k].space.slope * sc.space_off + g.declared[k].space.intercept;
                Scene retry = base;
                retry.target = g.outputs[k].base + g.outputs[k].axis * o_k;
                retry.ball = ball;
                RunResult r2 = run(retry, ball, 192, horizon);
                if (r2.outcome.kind == Outcome::Kind::Hit)
                    fail(ErrorCode::VerificationFailure,
                         g.name + ": sample at offset " + rat_to_string(sc.space_off) +
                             ", time " + rat_to_string(sc.time_off) + " routed to output " +
                             std::to_string(k) + " instead of " + std::to_string(sc.expect));
            }
            fail(ErrorCode::VerificationFailure,
                 g.name + ": sample at offset " + rat_to_string(sc.space_off) + ", time " +
                     rat_to_string(sc.time_off) + " reached no declared output");
        }

        if (exact) {
            R t_hit = scalar_to_rational_checked(rr.outcome.time);
            if (t_hit != t_exp)
                fail(ErrorCode::VerificationFailure,
                     g.name + ": arrival time " + rat_to_string(t_hit) + " != declared " +
                         rat_to_string(t_exp) + " at offset " + rat_to_string(sc.space_off) +
                         ", time " + rat_to_string(sc.time_off));
            R sp2 = scalar_to_rational_checked(dot(rr.final_state.vel, rr.final_state.vel));
            if (sp2 != v * v)
                fail(ErrorCode::VerificationFailure,
                     g.name + ": exit speed changed (|v|^2 = " + rat_to_string(sp2) + ")");
        } else {
            BigFloat t_hit = rr.outcome.time.bigfloat();
            BigFloat resid = (t_hit - BigFloat(t_exp, t_hit.precision())).abs();
            if (resid > BigFloat(tol_time, t_hit.precision()))
                fail(ErrorCode::VerificationFailure,
                     g.name + ": arrival-time residual " + resid.to_string() +
                         " exceeds 1e-20 at offset " + rat_to_string(sc.space_off));
            rep.max_time_residual = std::max(rep.max_time_residual, resid.to_double());
            BigFloat sp2 = dot(rr.final_state.vel, rr.final_state.vel).bigfloat();
            BigFloat dv = (sp2 - BigFloat(v * v, sp2.precision())).abs();
            if (dv > BigFloat(tol_speed2, sp2.precision()))
                fail(ErrorCode::VerificationFailure,
                     g.name + ": exit speed drifted by more than 1e-20");
            rep.max_speed_residual = std::max(rep.max_speed_residual, dv.to_double());
            double dx = scalar_to_double(rr.final_state.pos.x) - target.x.get_d();
            double dy = scalar_to_double(rr.final_state.pos.y) - target.y.get_d();
            rep.max_space_residual =
                std::max(rep.max_space_residual, std::abs(dx) + std::abs(dy));
        }
        ++rep.routed[sc.expect];
        ++rep.samples;
    }
    return rep;
}

std::vector<CatalogEntry> gadget_catalog() {
    std::vector<std::pair<std::string, Gadget>> entries;
    entries.emplace_back("", make_space_mult(Factor::Half));
    entries.emplace_back("", make_space_mult(Factor::Double));
    entries.emplace_back("", make_order_reverser());
    entries.emplace_back("bit=0", make_push(0));
    entries.emplace_back("bit=1", make_push(1));
    entries.emplace_back("", make_pop_space());
    entries.emplace_back("d=4", make_delay(4));
    entries.emplace_back("", make_rejoin());
    entries.emplace_back("v=1 d1=1 d2=1 d3=1",
                         make_time_mult_bumpers(Factor::Double, 1, 1, 1, 1));
    entries.emplace_back("v=1 d1=1 d2=2 d3=1",
                         make_time_mult_bumpers(Factor::Half, 1, 1, 2, 1));
    entries.emplace_back("v=1 d2=18", make_time_mult_moving(Factor::Double, 1, 18));
    entries.emplace_back("v=1 d2=18", make_time_mult_moving(Factor::Half, 1, 18));
    entries.emplace_back("kappa=1/100 eps=1/15 v=1",
                         make_time_separator(R(1, 100), R(1, 15), 1));
    entries.emplace_back("eps=1/8 d1=2 d2=3",
                         make_ray_time_mult(Factor::Double, R(1, 8), 2, 3));
    entries.emplace_back("eps=1/8 d1=2 d2=3",
                         make_ray_time_mult(Factor::Half, R(1, 8), 2, 3));

    std::vector<CatalogEntry> out;
    for (auto& [params, g] : entries) {
        CatalogEntry e;
        e.name = g.name;
        e.params = params;
        e.component_count = g.fragment.size();
        e.maps = g.declared;
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace pinball
