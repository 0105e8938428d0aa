#pragma once

#include <optional>

#include "pinball/scene.hpp"

namespace pinball {

enum class EventKind { Reflect, Pass, BumperHit, MovingWallHit };

const char* event_kind_name(EventKind k);

// Backend-erased event for traces and tooling; inside the engine events stay
// in the working scalar type.
struct Event {
    Scalar time;
    std::string component_id;
    Scalar x, y;
    EventKind kind;
};

struct Trace {
    BallR initial;
    std::vector<Event> events;
};

struct Outcome {
    enum class Kind { Hit, BoundExhausted, Escaped };
    Kind kind = Kind::Escaped;
    // Hit: earliest incidence time. BoundExhausted: time reached when a bound
    // tripped. Escaped: time of the last event (or the start time).
    Scalar time;
    long events_used = 0;
};

struct RunResult {
    Outcome outcome;
    Trace trace;
    // bounces that the per-step reflection budget counts; gate passes are
    // events but not reflections
    long reflections = 0;
    // ball state when the run stopped (at the hit point for Hit outcomes)
    BallStateT<Scalar> final_state;
};

// Event-driven evolution under explicit bounds. Throws on degenerate
// contacts, simultaneous contacts, and exact-backend irrationality; the CLI
// turns those into diagnostics.
RunResult run(const Scene& s, const BallR& b0, long max_events, const Rational& max_time);

// The earliest strictly-future contact before the horizon, or nothing.
// Exposed for tests and the gadget verifier; run() uses the same search.
std::optional<Event> next_event(const BallR& b, const Scene& s, const Rational& horizon);

// Parameter of the target's projection onto [p0, p1] if the target lies on
// the segment: exact membership for Rational (tol ignored), perpendicular
// distance <= tol for BigFloat.
template <class S>
std::optional<S> target_on_segment(const Vec<S>& p0, const Vec<S>& p1, const Vec<S>& target,
                                   const S& tol);

} // namespace pinball
