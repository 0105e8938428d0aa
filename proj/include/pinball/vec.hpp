#pragma once

#include "pinball/errors.hpp"
#include "pinball/scalar.hpp"

namespace pinball {

template <class S>
struct Vec {
    S x{};
    S y{};
};

template <class S>
Vec<S> operator+(const Vec<S>& a, const Vec<S>& b) {
    return {a.x + b.x, a.y + b.y};
}

template <class S>
Vec<S> operator-(const Vec<S>& a, const Vec<S>& b) {
    return {a.x - b.x, a.y - b.y};
}

template <class S>
Vec<S> operator-(const Vec<S>& v) {
    return {-v.x, -v.y};
}

template <class S>
Vec<S> operator*(const Vec<S>& v, const S& k) {
    return {v.x * k, v.y * k};
}

template <class S>
Vec<S> operator*(const S& k, const Vec<S>& v) {
    return {k * v.x, k * v.y};
}

template <class S>
bool operator==(const Vec<S>& a, const Vec<S>& b) {
    return a.x == b.x && a.y == b.y;
}

template <class S>
bool operator!=(const Vec<S>& a, const Vec<S>& b) {
    return !(a == b);
}

template <class S>
S dot(const Vec<S>& a, const Vec<S>& b) {
    return a.x * b.x + a.y * b.y;
}

template <class S>
S cross(const Vec<S>& a, const Vec<S>& b) {
    return a.x * b.y - a.y * b.x;
}

template <class S>
Vec<S> rot90ccw(const Vec<S>& v) {
    return {-v.y, v.x};
}

template <class S>
bool is_zero_vec(const Vec<S>& v) {
    return scalar_sign(v.x) == 0 && scalar_sign(v.y) == 0;
}

// Specular reflection about an (unnormalized) normal. Written as
// v - n*(k+k) with k = (v.n)/(n.n) so no integer constants are needed and
// rationality is preserved.
template <class S>
Vec<S> reflect(const Vec<S>& v, const Vec<S>& n) {
    if (is_zero_vec(n)) fail(ErrorCode::InvalidGeometry, "reflect: zero normal");
    S k = dot(v, n) / dot(n, n);
    S two_k = k + k; // a named scalar: gmp expression templates break deduction
    return v - n * two_k;
}

} // namespace pinball
