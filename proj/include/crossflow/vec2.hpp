#pragma once

#include <cmath>

namespace crossflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2& operator*=(double k) {
    x *= k;
    y *= k;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::sqrt(x * x + y * y); }
  constexpr double norm_sq() const { return x * x + y * y; }

  // Unit vector; `fallback` when the vector is (numerically) zero.
  Vec2 normalized(Vec2 fallback = {0.0, 1.0}) const {
    const double n = norm();
    if (n < 1e-12) return fallback;
    return {x / n, y / n};
  }
};

constexpr Vec2 operator*(double k, Vec2 v) { return {v.x * k, v.y * k}; }

}  // namespace crossflow
