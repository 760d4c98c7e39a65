#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "msmx/core.hpp"
#include "msmx/structure.hpp"

namespace msmx {

// Covariant Hamiltonian S(Z) = <P,H> + <Q,E> - mu/2 <H,H> - eps/2 <E,E>
// + <U,J> + <V,K>, and its gradient in (H,E,V,U,P,Q) block order:
// (P - mu H, Q - eps E, K, J, H, E).
double covariant_hamiltonian(const ExtendedState& z, double eps, double mu, const Vec3& J, const Vec3& K);
State18 grad_S(const ExtendedState& z, double eps, double mu, const Vec3& J, const Vec3& K);

struct Momenta {
    Vec3 P, Q;
};

// P = mu V_t + (1/2) curl U, Q = eps U_t - (1/2) curl V.
Momenta legendre_momenta(const Vec3& V_t, const Vec3& U_t, const Vec3& curlU, const Vec3& curlV, double eps,
                         double mu);

enum class LagrangianVariant { L1, L2, LPotential };

// Inputs for the Lagrangian densities. Derivative slots must be supplied
// explicitly for the chosen variant; plain field slots default to zero.
// L1 assumes eps = mu (function of space only); L2 assumes eps, mu constant
// in space. Those are caller obligations, not runtime checks, so diagnostics
// can probe what happens when they fail.
struct LagrangianInputs {
    std::optional<Vec3> H, E;
    std::optional<Vec3> curlH, curlE;
    std::optional<Vec3> E_t;
    std::optional<Vec3> V, U;
    std::optional<Vec3> V_t, U_t;
    std::optional<Vec3> curlV, curlU;
    std::optional<Vec3> J, K;
};

double lagrangian_density(LagrangianVariant variant, const LagrangianInputs& in, double eps, double mu);

// Extended state sampled on a uniform (x,t) rectangle, node-major in x.
struct SampledField2D {
    int nx = 0;  // sample count in x
    int nt = 0;  // sample count in t
    double x0 = 0.0, t0 = 0.0;
    double dx = 0.0, dt = 0.0;
    std::vector<State18> values;  // size nx*nt, index i*nt + j

    [[nodiscard]] const State18& at(int i, int j) const { return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(nt) + static_cast<std::size_t>(j)]; }
    [[nodiscard]] State18& at(int i, int j) { return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(nt) + static_cast<std::size_t>(j)]; }

    static SampledField2D sample(const std::function<ExtendedState(double, double)>& f, int nx, int nt, double x0,
                                 double t0, double dx, double dt);
};

// Residual of M Z_t + K1 Z_x - grad S(Z) on the interior of the sample
// rectangle, with 4th-order central differences (so the two outermost samples
// on every side are consumed by the stencil).
struct PdeResidualReport {
    int nx_interior = 0;
    int nt_interior = 0;
    std::vector<State18> residual;  // interior points, i-major
    double max_abs = 0.0;
};

PdeResidualReport pde_residual(const SampledField2D& field, const MsStructure& s,
                               const std::function<double(double)>& eps_fn,
                               const std::function<double(double)>& mu_fn,
                               const std::function<Vec3(double, double)>& J_fn,
                               const std::function<Vec3(double, double)>& K_fn);

}  // namespace msmx
