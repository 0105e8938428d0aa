#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pinball/components.hpp"

namespace pinball {

// Scene data is always stored exactly; the backend choice only controls the
// arithmetic used during simulation.
using VecR = Vec<Rational>;
using BallR = BallStateT<Rational>;
using WallR = WallT<Rational>;
using GateR = OneWayGateT<Rational>;
using ParabolaR = ParabolaT<Rational>;
using MovingWallR = MovingWallT<Rational>;
using BumperR = BumperT<Rational>;

using ComponentShape = std::variant<WallR, ParabolaR, GateR, MovingWallR, BumperR>;

struct Component {
    std::string id;
    ComponentShape shape;
};

struct Scene {
    Backend backend = Backend::ExactRational;
    long precision_bits = 256;
    // Constant-speed mode: speed-changing components are rejected at load.
    bool ray_mode = false;
    // The exact backend normally refuses scenes with moving parts (their
    // contact times are irrational in general). Machine scenes compiled by
    // this project only move walls tangentially, keeping every contact
    // rational, and set this override.
    bool allow_exact_moving = false;
    Rational speed_cap_ratio = Rational(1, 10); // wall speed cap, as a fraction of |ball.vel|
    BallR ball;
    VecR target;
    Rational target_tol = Rational(1, 1000000000); // target incidence tolerance (BigFloat only)
    std::vector<Component> components;
};

bool scene_has_moving(const Scene& s);

// Full load-time validation; throws InvalidScene (or InvalidGeometry for
// malformed shapes) naming the offending component.
void validate_scene(const Scene& s);

const Component* find_component(const Scene& s, const std::string& id);

// Exact membership test used by validation and the exact-backend simulator.
bool point_on_segment(const VecR& p, const VecR& a, const VecR& b);

} // namespace pinball
