#pragma once

// Periodic 3-torus geometry: minimum-image displacements and coordinate
// wrapping for a cubic box [-L/2, L/2)^3.

#include <cmath>

#include "hsvmc/errors.hpp"

namespace hsvmc {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }

    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

/// Cubic periodic box of side L centred on the origin.
class SimulationBox {
  public:
    explicit SimulationBox(double side) : side_(side), inv_side_(1.0 / side) {
        if (!(side > 0.0) || !std::isfinite(side))
            throw GeometryError("box side must be positive and finite");
    }

    double side() const { return side_; }
    double volume() const { return side_ * side_ * side_; }

    /// Wrap a coordinate into the primary cell [-L/2, L/2).
    double wrap_coord(double v) const {
        double w = v - side_ * std::floor(v * inv_side_ + 0.5);
        // floor can land on +L/2 when v*inv_side_ rounds poorly; fold it back.
        if (w >= 0.5 * side_) w -= side_;
        return w;
    }

    Vec3 wrap(Vec3 p) const { return {wrap_coord(p.x), wrap_coord(p.y), wrap_coord(p.z)}; }

    /// Minimum-image component in (-L/2, L/2]; exact ties map to +L/2.
    double min_image_coord(double d) const {
        double m = d - side_ * std::nearbyint(d * inv_side_);
        if (m <= -0.5 * side_) m += side_;
        return m;
    }

    /// Minimum-image displacement a - b.
    Vec3 min_image(Vec3 a, Vec3 b) const {
        return {min_image_coord(a.x - b.x), min_image_coord(a.y - b.y),
                min_image_coord(a.z - b.z)};
    }

    double distance2(Vec3 a, Vec3 b) const { return min_image(a, b).norm2(); }
    double distance(Vec3 a, Vec3 b) const { return std::sqrt(distance2(a, b)); }

  private:
    double side_;
    double inv_side_;
};

}  // namespace hsvmc
