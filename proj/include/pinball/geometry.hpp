#pragma once

#include <optional>
#include <utility>

#include "pinball/vec.hpp"

namespace pinball {

// y = a x^2 + b x + c restricted to x in [x0, x1]
template <class S>
struct ParabolaT {
    S a, b, c;
    S x0, x1;
};

template <class S>
struct BallStateT {
    Vec<S> pos;
    Vec<S> vel;
    S time{};
};

// Unnormalized inward-ish normal (-(2ax+b), 1); rational for rational inputs.
template <class S>
Vec<S> parabola_normal(const ParabolaT<S>& p, const S& x) {
    if (x < p.x0 || x > p.x1)
        fail(ErrorCode::OutOfDomain, "parabola_normal: x outside the parabola domain");
    return {-(p.a * x + p.a * x + p.b), scalar_like(1, x)};
}

template <class S>
Vec<S> parabola_focus(const ParabolaT<S>& p) {
    S four_a = p.a + p.a + p.a + p.a;
    return {-p.b / (p.a + p.a), p.c - p.b * p.b / four_a + scalar_like(1, p.a) / four_a};
}

// Earliest t > b.time at which the ball's ray meets the closed segment A-B.
// Endpoint hits are returned; the response layer decides whether they are
// degenerate. A ray lying in the segment's line is degenerate here.
template <class S>
std::optional<S> ray_segment_hit(const BallStateT<S>& b, const Vec<S>& A, const Vec<S>& B) {
    if (is_zero_vec(b.vel)) fail(ErrorCode::InvalidGeometry, "ray_segment_hit: zero velocity");
    Vec<S> d = B - A;
    if (is_zero_vec(d)) fail(ErrorCode::InvalidGeometry, "ray_segment_hit: degenerate segment");
    Vec<S> w = A - b.pos;
    S denom = cross(b.vel, d);
    if (scalar_sign(denom) == 0) {
        if (scalar_sign(cross(w, d)) == 0)
            fail(ErrorCode::DegenerateContact, "ray collinear with segment");
        return std::nullopt;
    }
    S u = cross(w, d) / denom;
    if (scalar_sign(u) <= 0) return std::nullopt;
    Vec<S> hit = b.pos + b.vel * u;
    S s = dot(hit - A, d) / dot(d, d);
    if (scalar_sign(s) < 0 || s > scalar_like(1, s)) return std::nullopt;
    return b.time + u;
}

namespace detail {

// Sign of m + r and m - r where r = sqrt(D) is a positive irrational with
// rational D and m rational. Never zero: equality would make D a perfect
// rational square. Lets the exact backend decide root admissibility without
// representing the root.
inline int sign_plus_sqrt(const Rational& m, const Rational& D) {
    if (sgn(m) >= 0) return 1;
    return (D > m * m) ? 1 : -1;
}
inline int sign_minus_sqrt(const Rational& m, const Rational& D) {
    if (sgn(m) <= 0) return -1;
    return (m * m > D) ? 1 : -1;
}

// Does some quadratic root u = (-B ± sqrt(D))/(2A) satisfy u > 0 and
// x0 <= px + u*vx <= x1, with D > 0 not a perfect square?
inline bool irrational_root_admissible(const Rational& A, const Rational& B, const Rational& D,
                                       const Rational& px, const Rational& vx,
                                       const Rational& x0, const Rational& x1) {
    for (int branch : {+1, -1}) {
        // u - theta = (
        //   -B - 2 A theta ± sqrt(D)) / (2A); evaluate each constraint's sign
        auto cmp_u_vs = [&](const Rational& theta) {
            Rational m = -B - 2 * A * theta;
            int num_sign = branch > 0 ? sign_plus_sqrt(m, D) : sign_minus_sqrt(m, D);
            return num_sign * sgn(A); // sign of u - theta (2A keeps A's sign)
        };
        if (cmp_u_vs(Rational(0)) <= 0) continue; // u > 0 fails
        if (sgn(vx) == 0) {
            if (px < x0 || px > x1) continue;
        } else {
            // x in [x0,x1]  <=>  u between (x0-px)/vx and (x1-px)/vx
            Rational lo = (x0 - px) / vx, hi = (x1 - px) / vx;
            if (lo > hi) std::swap(lo, hi);
            if (cmp_u_vs(lo) < 0 || cmp_u_vs(hi) > 0) continue;
        }
        return true;
    }
    return false;
}

} // namespace detail

// Earliest strictly-future intersection with the parabola arc. Under the
// exact backend an admissible intersection whose time is irrational raises
// NonRationalIntersection (the caller may rerun with BigFloat).
template <class S>
std::optional<std::pair<S, Vec<S>>> ray_parabola_hit(const BallStateT<S>& b,
                                                     const ParabolaT<S>& p) {
    if (is_zero_vec(b.vel)) fail(ErrorCode::InvalidGeometry, "ray_parabola_hit: zero velocity");
    const S &px = b.pos.x, &py = b.pos.y, &vx = b.vel.x, &vy = b.vel.y;
    S A = p.a * vx * vx;
    S B = p.a * (px * vx + px * vx) + p.b * vx - vy;
    S C = p.a * px * px + p.b * px + p.c - py;

    auto admit = [&](const S& u) -> bool {
        if (scalar_sign(u) <= 0) return false;
        S x = px + u * vx;
        return !(x < p.x0 || x > p.x1);
    };
    auto result = [&](const S& u) -> std::optional<std::pair<S, Vec<S>>> {
        Vec<S> hit{px + u * vx, py + u * vy};
        return std::make_pair(b.time + u, hit);
    };

    if (scalar_sign(A) == 0) {
        if (scalar_sign(B) == 0) return std::nullopt;
        S u = -C / B;
        if (!admit(u)) return std::nullopt;
        return result(u);
    }

    S disc = B * B - A * C * scalar_like(4, A);
    int ds = scalar_sign(disc);
    if (ds < 0) return std::nullopt;
    if (ds == 0) {
        S u = -B / (A + A);
        if (!admit(u)) return std::nullopt;
        return result(u);
    }

    if constexpr (std::is_same_v<S, Rational>) {
        auto sq = rational_sqrt_exact(disc);
        if (!sq) {
            if (detail::irrational_root_admissible(A, B, disc, px, vx, p.x0, p.x1))
                fail(ErrorCode::NonRationalIntersection,
                     "parabola intersection time is irrational under the exact backend");
            return std::nullopt;
        }
        S u1 = (-B - *sq) / (A + A);
        S u2 = (-B + *sq) / (A + A);
        if (u2 < u1) std::swap(u1, u2);
        if (admit(u1)) return result(u1);
        if (admit(u2)) return result(u2);
        return std::nullopt;
    } else {
        S r = disc.sqrt();
        S u1 = (-B - r) / (A + A);
        S u2 = (-B + r) / (A + A);
        if (u2 < u1) std::swap(u1, u2);
        if (admit(u1)) return result(u1);
        if (admit(u2)) return result(u2);
        return std::nullopt;
    }
}

} // namespace pinball
