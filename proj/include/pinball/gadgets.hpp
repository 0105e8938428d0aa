#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pinball/scene.hpp"

namespace pinball {

// Oriented reference line where a ball enters or leaves a gadget. Offsets are
// measured along `axis` from `base`; the segment [seg_a, seg_b] covers the
// declared offset interval. `inward` is the travel direction of a ball
// crossing the port (for output ports: the direction it leaves with).
struct Port {
    VecR seg_a, seg_b;
    VecR base;
    VecR axis;
    VecR inward;
    Rational time_base = 0;
    Interval<Rational> offsets;
};

struct AffineMap1D {
    Rational slope = 1;
    Rational intercept = 0;
};

// Declared input->output relation. A ball crossing the input port at offset
// (s, dt) crosses the output port at space offset space.slope*s +
// space.intercept and at absolute time out.time_base + time.slope*dt +
// time.intercept. Space-gadget time intercepts assume unit entry speed.
struct TransferMap {
    AffineMap1D space;
    AffineMap1D time;
    bool reversing = false;
};

struct Gadget {
    std::string name;
    std::vector<Component> fragment;
    Port input;
    std::optional<Port> input_b; // rejoin only; same declared map as `input`
    std::vector<Port> outputs;
    std::vector<TransferMap> declared; // one per output

    // Simulation conventions the declared maps assume.
    Rational entry_speed = 1;
    bool ray_mode = false;
    bool exact_capable = true;          // false when contact times are irrational
    Rational speed_cap = Rational(1, 10); // scene speed_cap_ratio to run under
    // Admissible entry time offsets (sampling windows for verification).
    std::vector<Interval<Rational>> time_windows;
    // Which output a ball at (space offset, time offset) must reach.
    std::function<size_t(const Rational&, const Rational&)> route;
};

// Placement utilities: rigid translation of a fragment piece and schedule
// clock shifts for phasing a fragment to a new arrival time.
Component translated_component(Component c, const VecR& d);
void shift_component_clock(Component& c, const Rational& dt);
Port translated_port(Port p, const VecR& d, const Rational& dt);

enum class Factor { Half, Double };

// Shared-focus parabola pairs; space offset scaled by 1/2 or 2, order reversed.
// All curve gadgets take the entry speed v; path lengths are fixed, so the
// declared time intercepts scale as 1/v.
Gadget make_space_mult(Factor f, const Rational& v = 1);
// Parabola pair with space slope 1; composed after a mult it restores order.
Gadget make_order_reverser(const Rational& v = 1);
// Stack push on the space offset: s -> (s + bit)/2. Input interval [0,1).
Gadget make_push(int bit, const Rational& v = 1);
// Stack pop on the space offset: doubles, then forks on the top bit.
// outputs[0] = left (bit 0, s' = 2s), outputs[1] = right (bit 1, s' = 2s-1).
Gadget make_pop_space(const Rational& v = 1);
// Lengthens every path by exactly d with four 45-degree walls; space identity.
Gadget make_delay(const Rational& d, const Rational& v = 1);
// Two input ports merged onto one output through a one-way gate; both paths
// have equal length, so arrival times agree.
Gadget make_rejoin(const Rational& v = 1);
// Time-offset multiplier from two retroreflecting pads with scheduled speed
// effects. Declared time slope 2 (Double) or 1/2 (Half), intercept
// (d1+d2+d3)/v.
Gadget make_time_mult_bumpers(Factor f, const Rational& v, const Rational& d1,
                              const Rational& d2, const Rational& d3);
// Same transfer from two translating walls (unit moving intervals, rational
// ramp schedules). Declared intercept (d2+2)/v. Contact times are algebraic,
// not rational: big-float backend only.
Gadget make_time_mult_moving(Factor f, const Rational& v, const Rational& d2);
// Routes early time offsets [0,1/2) to port E (outputs[0]) and late offsets
// [1,3/2) to port L (outputs[1], time base shifted by 1) with a wall that
// slides along its own diagonal.
Gadget make_time_separator(const Rational& kappa, const Rational& eps, const Rational& v);
// Constant-speed time multiplier: a chain of stages whose walls recede (or
// approach) slowly enough that |wall speed| <= eps * v, composing to exactly
// factor 2 or 1/2. Unit entry speed.
Gadget make_ray_time_mult(Factor f, const Rational& eps, const Rational& d1,
                          const Rational& d2);

// Welds b's input port onto output `out` of `a` (rigid translation plus a
// time re-base of b's schedules). `a` must have exactly one output; entry
// speeds and modes must match. Declared maps compose.
Gadget compose(const Gadget& a, size_t out, const Gadget& b);
Gadget compose(const Gadget& a, const Gadget& b);

// Narrows the declared input offset interval (the geometry already covers it).
Gadget restrict_input(Gadget g, const Interval<Rational>& offsets);

struct VerifyReport {
    long samples = 0;
    std::vector<long> routed;   // per-output sample counts
    double max_space_residual = 0;
    double max_time_residual = 0;
    double max_speed_residual = 0;
    bool reversing = false;     // declared orientation, confirmed by the hits
};

// Simulates n_samples offsets spread over the input interval and time
// windows and checks every sample against the declared transfer maps
// (exactly under ExactRational, within 1e-20 under BigFloat). Any sample
// that misses its declared output -- or lands on the wrong one -- throws
// VerificationFailure.
VerifyReport verify_transfer(const Gadget& g, int n_samples, Backend backend);

struct CatalogEntry {
    std::string name;
    std::string params;
    size_t component_count;
    std::vector<TransferMap> maps;
};

// One entry per constructor at representative parameters.
std::vector<CatalogEntry> gadget_catalog();

} // namespace pinball
