#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "msmx/errors.hpp"

namespace msmx {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }

    [[nodiscard]] bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Vec3 matvec(const Mat3& m, const Vec3& v) {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

enum class Axis { X = 0, Y = 1, Z = 2 };

// Antisymmetric generator of the curl along one axis: curl = R_x d/dx + R_y d/dy + R_z d/dz.
// R_x maps (a,b,c) to (0,-c,b).
Mat3 rot_matrix(Axis axis);

// Electromagnetic pair at a point.
struct FieldPoint {
    Vec3 H;
    Vec3 E;
};

// Full 18-component state (H,E,V,U,P,Q): potentials V,U with V_t = H, U_t = E and
// the conjugate momenta P,Q of the covariant Hamiltonian form.
struct ExtendedState {
    Vec3 H, E, V, U, P, Q;
};

// Flat view used by the structure matrices; block order (H,E,V,U,P,Q).
using State18 = std::array<double, 18>;

inline State18 to_flat(const ExtendedState& s) {
    State18 z{};
    const Vec3* blocks[6] = {&s.H, &s.E, &s.V, &s.U, &s.P, &s.Q};
    for (int b = 0; b < 6; ++b)
        for (int c = 0; c < 3; ++c) z[static_cast<std::size_t>(3 * b + c)] = (*blocks[b])[c];
    return z;
}

inline ExtendedState from_flat(const State18& z) {
    ExtendedState s;
    Vec3* blocks[6] = {&s.H, &s.E, &s.V, &s.U, &s.P, &s.Q};
    for (int b = 0; b < 6; ++b)
        for (int c = 0; c < 3; ++c) (*blocks[b])[c] = z[static_cast<std::size_t>(3 * b + c)];
    return s;
}

}  // namespace msmx
