#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "msmx/banded.hpp"
#include "msmx/scheme_common.hpp"

namespace msmx {

// One time level of the staggered 18-component state. Transverse components
// of H, E, V, U sit on nodes; P, Q (all three components) and the axial
// components of the fields sit on cells. Periodic levels drop the duplicate
// right node, so nodes() == nx there.
struct PreissmanLevel {
    double t = 0.0;
    int nx = 0;
    bool periodic = false;
    std::vector<V2> h, e, v, u;          // nodes()
    std::vector<Vec3> p, q;              // nx, cell-native
    std::vector<double> h1, e1, v1, u1;  // nx, axial components on cells

    [[nodiscard]] int nodes() const { return periodic ? nx : nx + 1; }
};

// Implicit box discretization of the six-field formulation on the staggered
// layout above. Each space-time cell contributes twelve scaled equations
// (six transverse pairs); the axial components decouple into per-cell
// two-term recurrences that are advanced exactly. The linear system depends
// only on (grid, medium, dt, boundary), so it is assembled and factored once
// in the constructor.
//
// dt_signed == 0 takes the step from the grid; a negative value steps
// backward in time, which is how reversibility is probed.
class PreissmanStepper {
  public:
    PreissmanStepper(const Grid1D& grid, MediumProfile medium, SourceProfile src, BoundarySpec bc,
                     double dt_signed = 0.0);

    [[nodiscard]] const Grid1D& grid() const { return grid_; }
    [[nodiscard]] const MediumProfile& medium() const { return medium_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] bool periodic() const { return periodic_; }

    [[nodiscard]] PreissmanLevel zero_level(double t0) const;

    // Plane-wave initial data; constant media only. The analytic gauge fills
    // V, U, P, Q from the closed-form potentials, the zero gauge leaves V, U
    // empty and sets P = mu*H, Q = eps*E, which satisfies the curl
    // constraints identically because the potentials vanish.
    [[nodiscard]] PreissmanLevel initial_exact(double t0, GaugeKind gauge) const;

    // Zero-gauge level from sampled nodal (H, E); cell quantities take the
    // mean of the adjacent nodes.
    [[nodiscard]] PreissmanLevel initial_sampled(const std::vector<FieldPoint>& nodal, double t0) const;

    PreissmanLevel step(const PreissmanLevel& a);

    // Scaled residuals of the twelve box equations on every cell; zero (to
    // rounding) across a solved step. with_sources=false drops the J, K terms
    // and thus evaluates the linearization, which tangent fields must satisfy.
    [[nodiscard]] std::vector<std::array<double, 12>> box_residuals(const PreissmanLevel& a,
                                                                    const PreissmanLevel& b,
                                                                    bool with_sources = true) const;

    // Full nodal (H, E): transverse parts are native, axial parts average the
    // adjacent cells (end nodes copy their single neighbour).
    [[nodiscard]] std::vector<FieldPoint> nodal_states(const PreissmanLevel& lvl) const;

  private:
    void assemble();
    [[nodiscard]] std::array<double, 12> cell_rows(int i, const PreissmanLevel& a, const PreissmanLevel& b,
                                                   bool with_sources) const;
    [[nodiscard]] int row_of(int cell, int r) const { return (periodic_ ? 0 : 4) + 12 * cell + r; }
    [[nodiscard]] double* slot_ptr(PreissmanLevel& lvl, int s) const;
    void check_level(const PreissmanLevel& lvl) const;

    Grid1D grid_;
    MediumProfile medium_;
    SourceProfile src_;
    BoundarySpec bc_;
    double dt_ = 0.0;
    bool periodic_ = false;
    bool pinned_ = false;  // even periodic grids carry a checkerboard null space
    int nsys_ = 0;
    std::optional<BandedMatrix> band_;         // non-periodic
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;  // periodic
};

// Time-independent shift of the potentials: V += dV(x), U += dU(x) on nodes,
// with the matching momentum update on cells that keeps every box equation,
// and hence the (H, E) trajectory, exactly unchanged.
void apply_gauge_shift(PreissmanLevel& lvl, const Grid1D& grid, const std::function<V2(double)>& dV,
                       const std::function<V2(double)>& dU);

// Convenience facade: one box-scheme step of nodal (H, E) data. Builds the
// solver, runs one step in the zero gauge, reads the fields back.
FieldLevel preissman_step(const Grid1D& grid, const MediumProfile& medium, const SourceProfile& src,
                          const BoundarySpec& bc, const FieldLevel& level);

}  // namespace msmx
