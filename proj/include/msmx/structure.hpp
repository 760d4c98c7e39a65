#pragma once

#include <array>

#include "msmx/core.hpp"

namespace msmx {

using Mat18 = std::array<std::array<double, 18>, 18>;

// Structure matrices of the Hamilton form M Z_t + K (curl Z) = grad S(Z).
// M pairs the potentials with their momenta ((V,P) and (U,Q) blocks); each
// K_i couples (H,U) and (E,V) through +-(1/2) R_i. All four are antisymmetric.
struct MsStructure {
    Mat18 M;
    Mat18 K1, K2, K3;
};

MsStructure assemble_ms_structure();

State18 mat18_apply(const Mat18& m, const State18& z);

// Value of the presymplectic forms on a tangent pair. The convention here is
// omega(xi, eta) = <M xi, eta> and kappa(xi, eta) = <K1 xi, eta> (the 1+1D
// reduction keeps K1 only); both flip sign under argument swap.
struct TwoFormValue {
    double omega = 0.0;
    double kappa = 0.0;
};

TwoFormValue two_forms(const State18& xi, const State18& eta, const MsStructure& s);

}  // namespace msmx
