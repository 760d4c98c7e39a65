#pragma once

#include <vector>

#include "msmx/grid.hpp"

namespace msmx {

// Transverse (y,z) pair. The 1D reduction keeps these on nodes while axial
// components live on cells, so it pays to have a dedicated little vector type.
struct V2 {
    double y = 0.0, z = 0.0;

    V2& operator+=(const V2& o) {
        y += o.y;
        z += o.z;
        return *this;
    }
    V2& operator-=(const V2& o) {
        y -= o.y;
        z -= o.z;
        return *this;
    }
    V2& operator*=(double s) {
        y *= s;
        z *= s;
        return *this;
    }
};

inline V2 operator+(V2 a, const V2& b) { return a += b; }
inline V2 operator-(V2 a, const V2& b) { return a -= b; }
inline V2 operator-(const V2& a) { return {-a.y, -a.z}; }
inline V2 operator*(double s, V2 a) { return a *= s; }
inline V2 operator*(V2 a, double s) { return a *= s; }

// Restriction of the axial rotation generator to the transverse plane:
// j2(w) = (e_x cross w)_{y,z}. Applying it twice gives -identity.
inline V2 j2(const V2& w) { return {-w.z, w.y}; }

// Axial component of a cross b for transverse vectors, equivalently
// dot(j2(a), b). Antisymmetric.
inline double cross2(const V2& a, const V2& b) { return a.y * b.z - a.z * b.y; }

inline V2 transverse(const Vec3& v) { return {v.y, v.z}; }

// Choice of potentials when seeding a run from an exact field state. The two
// gauges produce identical (H, E) trajectories up to discretization of the
// initial data; "zero" needs no closed-form potentials.
enum class GaugeKind { analytic, zero };

struct BoundarySpec {
    enum class Kind { periodic, dirichlet_exact, dirichlet_fixed };
    Kind kind = Kind::periodic;
    FieldPoint left, right;  // only read for dirichlet_fixed

    static BoundarySpec periodic() { return {Kind::periodic, {}, {}}; }
    static BoundarySpec dirichlet_exact() { return {Kind::dirichlet_exact, {}, {}}; }
    static BoundarySpec dirichlet_fixed(const FieldPoint& l, const FieldPoint& r) {
        return {Kind::dirichlet_fixed, l, r};
    }
};

// Source terms averaged over a space-time box by the four-corner rule, which
// is the quadrature the box discretization pairs with.
struct BoxSources {
    Vec3 j, k;
};

inline BoxSources box_sources(const SourceProfile& src, double xa, double xb, double ta, double tb) {
    if (src.is_zero()) return {};
    auto avg4 = [&](const std::function<Vec3(double, double)>& f) -> Vec3 {
        if (!f) return {};
        const Vec3 s = f(xa, ta) + f(xb, ta) + f(xa, tb) + f(xb, tb);
        return 0.25 * s;
    };
    return {avg4(src.J), avg4(src.K)};
}

// One time level of nodal (H, E) samples; what the two-level schemes exchange.
struct FieldLevel {
    double t = 0.0;
    std::vector<FieldPoint> f;
};

}  // namespace msmx
