#pragma once

#include <cstdint>
#include <vector>

#include "msmx/midpoint2.hpp"
#include "msmx/preissman.hpp"

namespace msmx {

// Per-cell sweep of a discrete conservation law. residuals is step-major:
// entry (j, i) is the two-form flux divergence over the space-time cell
// [x_i, x_{i+1}] x [t_j, t_{j+1}]. scale records the largest single flux
// term |kappa|/dx or |omega|/dt seen anywhere, so relative() is invariant
// under a global rescaling of the form convention.
struct ResidualReport {
    int nx = 0;
    int nt = 0;
    std::vector<double> residuals;  // nt * nx entries
    double max_abs = 0.0;
    double scale = 0.0;

    [[nodiscard]] double at(int step, int cell) const {
        return residuals[static_cast<std::size_t>(step) * static_cast<std::size_t>(nx) +
                         static_cast<std::size_t>(cell)];
    }
    [[nodiscard]] double relative() const { return scale > 0.0 ? max_abs / scale : 0.0; }
};

// Two tangent trajectories of a scheme on a shared grid. The schemes are
// linear, so a tangent is exactly a difference of two solutions sharing
// sources and boundary data, and it satisfies the source-free equations.
struct TangentPair {
    std::vector<PreissmanLevel> xi, eta;
};

struct TangentPair2F {
    std::vector<TwoFieldLevel> xi, eta;
};

// Smooth random data filling every staggered slot; seed 0 gives the zero
// level. Non-periodic data is windowed to vanish at both ends, so it is
// compatible with homogeneous Dirichlet rows from the first step on.
[[nodiscard]] PreissmanLevel random_tangent_level(const Grid1D& grid, bool periodic, double t0,
                                                  std::uint64_t seed);
[[nodiscard]] TwoFieldLevel random_tangent_level_2field(const Grid1D& grid, bool periodic, double t0,
                                                        std::uint64_t seed);

// Evolves two random tangents through nt source-free steps and certifies
// every cell of every step against the linearized box equations (within
// 1e-10 of the row scale). Dirichlet boundary kinds collapse to homogeneous
// Dirichlet data for tangents, since differences of solutions sharing
// boundary values vanish there.
TangentPair make_tangent_pair(const Grid1D& grid, const MediumProfile& medium, const BoundarySpec& bc,
                              int nt, std::uint64_t seed_xi, std::uint64_t seed_eta);
TangentPair2F make_tangent_pair_2field(const Grid1D& grid, const MediumProfile& medium,
                                       const BoundarySpec& bc, int nt, std::uint64_t seed_xi,
                                       std::uint64_t seed_eta);

// Discrete multisymplectic conservation law of the six-field box scheme:
//
//   (kappa_{i+1,j+1/2} - kappa_{i,j+1/2}) / dx
//     + (omega_{i+1/2,j+1} - omega_{i+1/2,j}) / dt  =  0,
//
// kappa evaluated on time-averaged nodal tangent values, omega on
// cell-interpolated values, both through the assembled structure matrices
// (the half-strength curl blocks of K1 fold the customary factor-two
// denominator into dx). The identity holds to rounding for any admissible
// medium, constant or varying, because the per-cell Hessian is symmetric.
ResidualReport msc_residual_preissman(const TangentPair& pair, const Grid1D& grid,
                                      const MediumProfile& medium);

// Same law for the reduced two-field midpoint scheme (constant media), with
// kappa = -(1/eps) dH x dH - (1/mu) dE x dE on the transverse plane and
// omega = <dE, dH> antisymmetrized over the pair.
ResidualReport msc_residual_2field(const TangentPair2F& pair, const Grid1D& grid,
                                   const MediumProfile& medium);

// Trapezoidal space integral of (mu |H|^2 + eps |E|^2) / 2 per level, with
// node-averaged medium values. Levels carrying grid.nx samples are treated
// as periodic (uniform weights), nx + 1 as a closed interval (half weights
// at the ends). The schemes conserve no discrete energy exactly, so this is
// a diagnostic, not an invariant.
std::vector<double> energy_diagnostic(const std::vector<FieldLevel>& run, const Grid1D& grid,
                                      const MediumProfile& medium);

}  // namespace msmx
