#include "msmx/exact.hpp"

#include <cmath>

#include "msmx/errors.hpp"

namespace msmx {

namespace {

void check_medium(double eps, double mu) {
    if (!(eps > 0.0) || !(mu > 0.0)) {
        throw ValidationError("plane wave requires eps > 0 and mu > 0");
    }
}

}  // namespace

FieldPoint exact_plane_wave(double x, double t, double eps, double mu) {
    check_medium(eps, mu);
    const double theta = x - t / std::sqrt(eps * mu);
    const double s = std::sin(theta);
    FieldPoint f{};
    f.H = Vec3{0.0, -std::sqrt(eps / mu) * s, 0.0};
    f.E = Vec3{0.0, 0.0, s};
    return f;
}

PotentialPoint exact_potentials(double x, double t, double eps, double mu) {
    check_medium(eps, mu);
    const double root = std::sqrt(eps * mu);
    const double theta = x - t / root;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    PotentialPoint p{};
    p.V = Vec3{0.0, -eps * c, 0.0};
    p.U = Vec3{0.0, 0.0, root * c};
    p.P = Vec3{0.0, -0.5 * root * s, 0.0};
    p.Q = Vec3{0.0, 0.0, 0.5 * eps * s};
    return p;
}

ExtendedState exact_extended_state(double x, double t, double eps, double mu) {
    const FieldPoint f = exact_plane_wave(x, t, eps, mu);
    const PotentialPoint p = exact_potentials(x, t, eps, mu);
    ExtendedState z{};
    z.H = f.H;
    z.E = f.E;
    z.V = p.V;
    z.U = p.U;
    z.P = p.P;
    z.Q = p.Q;
    return z;
}

}  // namespace msmx
