#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace exspec {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Physical constants of a run. Everything downstream is expressed in these
/// units; defaults put hbar = m = 1.
struct Units {
  double hbar = 1.0;
  double mass = 1.0;

  /// hbar^2 / (2 m), the kinetic prefactor of a single mode.
  double kinetic_half() const { return hbar * hbar / (2.0 * mass); }
  /// hbar^2 / m.
  double kinetic_full() const { return hbar * hbar / mass; }
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  friend Vec3 operator*(double s, const Vec3& v) { return v * s; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
};

/// Integer lattice index triple (n1, n2, n3).
struct Vec3i {
  int x = 0, y = 0, z = 0;

  Vec3i operator+(const Vec3i& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3i operator-(const Vec3i& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3i operator-() const { return {-x, -y, -z}; }
  Vec3i operator*(int s) const { return {x * s, y * s, z * s}; }

  bool operator==(const Vec3i& o) const = default;

  std::int64_t norm2() const {
    return std::int64_t(x) * x + std::int64_t(y) * y + std::int64_t(z) * z;
  }
  double norm() const { return std::sqrt(double(norm2())); }
};

enum class Statistics { bose, fermi };

inline const char* to_string(Statistics s) {
  return s == Statistics::bose ? "bose" : "fermi";
}

}  // namespace exspec
