#pragma once

#include <array>
#include <cmath>

namespace wirewall {

struct Vec2 {
  double y{0.0};
  double z{0.0};

  constexpr Vec2 operator+(const Vec2& o) const { return {y + o.y, z + o.z}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {y - o.y, z - o.z}; }
  constexpr Vec2 operator*(double s) const { return {y * s, z * s}; }
  constexpr double dot(const Vec2& o) const { return y * o.y + z * o.z; }
  double norm() const { return std::hypot(y, z); }
};

inline Vec2 rotate(const Vec2& p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.y - s * p.z, s * p.y + c * p.z};
}

/// Magnetization sample; components are (x, y, z) = (axial, transverse, transverse).
struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline Vec3 normalized(const Vec3& v) {
  const double n = v.norm();
  return {v.x / n, v.y / n, v.z / n};
}

/// Removes the component of g along the unit vector m.
constexpr Vec3 tangent_part(const Vec3& g, const Vec3& m) { return g - m * g.dot(m); }

inline constexpr Vec3 kAxisMinus{-1.0, 0.0, 0.0};
inline constexpr Vec3 kAxisPlus{1.0, 0.0, 0.0};

}  // namespace wirewall
