#include "pinball/scene.hpp"

#include <set>

namespace pinball {

namespace {

void reject(const std::string& id, const std::string& what) {
    fail(ErrorCode::InvalidScene, "component '" + id + "': " + what);
}

bool on_parabola(const VecR& p, const ParabolaR& pb) {
    if (p.x < pb.x0 || p.x > pb.x1) return false;
    return p.y == pb.a * p.x * p.x + pb.b * p.x + pb.c;
}

} // namespace

bool point_on_segment(const VecR& p, const VecR& a, const VecR& b) {
    VecR d = b - a;
    if (sgn(cross(p - a, d)) != 0) return false;
    Rational s = dot(p - a, d) / dot(d, d);
    return sgn(s) >= 0 && s <= 1;
}

bool scene_has_moving(const Scene& s) {
    for (const auto& c : s.components)
        if (std::holds_alternative<MovingWallR>(c.shape) ||
            std::holds_alternative<BumperR>(c.shape))
            return true;
    return false;
}

const Component* find_component(const Scene& s, const std::string& id) {
    for (const auto& c : s.components)
        if (c.id == id) return &c;
    return nullptr;
}

void validate_scene(const Scene& s) {
    if (is_zero_vec(s.ball.vel))
        fail(ErrorCode::InvalidScene, "ball velocity must be nonzero");
    if (sgn(s.speed_cap_ratio) <= 0)
        fail(ErrorCode::InvalidScene, "speed_cap_ratio must be positive");
    if (sgn(s.target_tol) <= 0)
        fail(ErrorCode::InvalidScene, "target_tol must be positive");
    if (s.backend == Backend::BigFloatBackend && s.precision_bits < BigFloat::min_precision)
        fail(ErrorCode::InvalidScene, "precision_bits must be at least 64");

    if (s.backend == Backend::ExactRational && scene_has_moving(s) && !s.allow_exact_moving)
        fail(ErrorCode::InvalidScene,
             "the exact backend cannot simulate moving components; "
             "use the big-float backend or set allow_exact_moving");

    // cap on physical wall speed: speed_cap_ratio * |ball.vel|, squared to
    // stay rational
    Rational cap_sq = s.speed_cap_ratio * s.speed_cap_ratio * dot(s.ball.vel, s.ball.vel);

    std::set<std::string> seen;
    for (const auto& c : s.components) {
        if (c.id.empty()) fail(ErrorCode::InvalidScene, "component with an empty id");
        if (!seen.insert(c.id).second) reject(c.id, "duplicate id");

        std::visit(
            [&](const auto& shape) {
                using T = std::decay_t<decltype(shape)>;
                if constexpr (std::is_same_v<T, WallR>) {
                    if (shape.a == shape.b) reject(c.id, "wall segment is degenerate");
                    if (point_on_segment(s.ball.pos, shape.a, shape.b))
                        reject(c.id, "ball starts on this wall");
                } else if constexpr (std::is_same_v<T, GateR>) {
                    if (shape.start == shape.end) reject(c.id, "gate segment is degenerate");
                    if (point_on_segment(s.ball.pos, shape.start, shape.end))
                        reject(c.id, "ball starts on this gate");
                } else if constexpr (std::is_same_v<T, ParabolaR>) {
                    if (sgn(shape.a) == 0) reject(c.id, "parabola needs a nonzero quadratic term");
                    if (!(shape.x0 < shape.x1)) reject(c.id, "parabola domain is empty");
                    if (on_parabola(s.ball.pos, shape))
                        reject(c.id, "ball starts on this parabola");
                } else if constexpr (std::is_same_v<T, MovingWallR>) {
                    if (shape.a == shape.b) reject(c.id, "wall segment is degenerate");
                    if (is_zero_vec(shape.motion_dir)) reject(c.id, "motion_dir must be nonzero");
                    validate_schedule(shape.schedule, "component '" + c.id + "'");
                    validate_wall_speed_cap(shape, cap_sq, ErrorCode::InvalidScene,
                                            "component '" + c.id + "'");
                    auto [disp, vel] = wall_state_at(shape, s.ball.time);
                    (void)vel;
                    VecR off = shape.motion_dir * disp;
                    if (point_on_segment(s.ball.pos, shape.a + off, shape.b + off))
                        reject(c.id, "ball starts on this wall");
                } else if constexpr (std::is_same_v<T, BumperR>) {
                    if (s.ray_mode)
                        reject(c.id, "bumpers are not allowed in constant-speed mode");
                    validate_bumper(shape, "component '" + c.id + "'");
                    if (point_on_segment(s.ball.pos, shape.a, shape.b))
                        reject(c.id, "ball starts on this bumper");
                }
            },
            c.shape);
    }
}

} // namespace pinball
