// Copyright 2026 The socnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <numbers>

namespace socnav {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// World frame: x east, y north, angles counterclockwise from east.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
};

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  if (a >= -kPi && a < kPi) return a;
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r = -kPi;
  return r;
}

/// Wraps an angle into [0, 2pi).
inline double wrap_angle_positive(double a) {
  if (a >= 0.0 && a < kTwoPi) return a;
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Absolute angular difference folded into [0, pi].
inline double angle_between(double a, double b) { return std::abs(wrap_angle(a - b)); }

/// Planar pose; theta is kept in [-pi, pi) by construction.
class Pose {
 public:
  Pose() = default;
  Pose(double x, double y, double theta) : x_(x), y_(y), theta_(wrap_angle(theta)) {}
  Pose(Vec2 p, double theta) : Pose(p.x, p.y, theta) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }

  friend bool operator==(const Pose&, const Pose&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

inline double euclidean_distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace socnav
