#pragma once

#include "msmx/core.hpp"

namespace msmx {

// Travelling plane wave for constant media: the only nonzero components are
//   H2 = -sqrt(eps/mu) * sin(x - t/sqrt(eps*mu)),  E3 = sin(x - t/sqrt(eps*mu)).
// Solves the source-free Maxwell system exactly. eps, mu must be positive.
FieldPoint exact_plane_wave(double x, double t, double eps, double mu);

// Potentials and momenta completing the plane wave to an 18-component state:
// V,U are the zero-mean antiderivatives of H,E in time; P,Q follow from the
// Legendre relations P = mu*V_t + (1/2)curl U, Q = eps*U_t - (1/2)curl V.
struct PotentialPoint {
    Vec3 V, U, P, Q;
};
PotentialPoint exact_potentials(double x, double t, double eps, double mu);

// Convenience: the full 18-component exact state.
ExtendedState exact_extended_state(double x, double t, double eps, double mu);

}  // namespace msmx
