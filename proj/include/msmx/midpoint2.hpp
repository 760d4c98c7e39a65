#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "msmx/banded.hpp"
#include "msmx/scheme_common.hpp"

namespace msmx {

// One time level of the reduced two-field state: transverse (H, E) on nodes,
// axial components on cells. Periodic levels drop the duplicate right node.
struct TwoFieldLevel {
    double t = 0.0;
    int nx = 0;
    bool periodic = false;
    std::vector<V2> h, e;          // nodes()
    std::vector<double> h1, e1;    // nx

    [[nodiscard]] int nodes() const { return periodic ? nx : nx + 1; }
};

// Box midpoint discretization of the first-order (H, E) system. Folding the
// medium into the flux matrix only works when eps and mu are spatially
// constant, so that is a hard requirement here; the six-field solver covers
// the varying case. Dirichlet boundaries pin the transverse E at both ends.
class MidpointTwoField {
  public:
    MidpointTwoField(const Grid1D& grid, MediumProfile medium, SourceProfile src, BoundarySpec bc,
                     double dt_signed = 0.0);

    [[nodiscard]] const Grid1D& grid() const { return grid_; }
    [[nodiscard]] double dt() const { return dt_; }

    [[nodiscard]] TwoFieldLevel zero_level(double t0) const;
    [[nodiscard]] TwoFieldLevel initial_exact(double t0) const;
    [[nodiscard]] TwoFieldLevel initial_sampled(const std::vector<FieldPoint>& nodal, double t0) const;

    TwoFieldLevel step(const TwoFieldLevel& a);

    // Scaled residuals of the four box equations on every cell; zero (to
    // rounding) across a solved step. with_sources=false evaluates the
    // linearization tangent fields must satisfy.
    [[nodiscard]] std::vector<std::array<double, 4>> box_residuals(const TwoFieldLevel& a, const TwoFieldLevel& b,
                                                                   bool with_sources = true) const;

    [[nodiscard]] std::vector<FieldPoint> nodal_states(const TwoFieldLevel& lvl) const;

  private:
    void assemble();
    [[nodiscard]] std::array<double, 4> cell_rows(int i, const TwoFieldLevel& a, const TwoFieldLevel& b,
                                                  bool with_sources) const;
    [[nodiscard]] int row_of(int cell, int r) const { return (periodic_ ? 0 : 2) + 4 * cell + r; }
    [[nodiscard]] double* slot_ptr(TwoFieldLevel& lvl, int s) const;
    void check_level(const TwoFieldLevel& lvl) const;

    Grid1D grid_;
    MediumProfile medium_;
    SourceProfile src_;
    BoundarySpec bc_;
    double dt_ = 0.0;
    double eps_ = 0.0, mu_ = 0.0;
    bool periodic_ = false;
    int nsys_ = 0;
    std::optional<BandedMatrix> band_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// Convenience facade: one midpoint step of nodal (H, E) data.
FieldLevel midpoint_step_2field(const Grid1D& grid, const MediumProfile& medium, const SourceProfile& src,
                                const BoundarySpec& bc, const FieldLevel& level);

}  // namespace msmx
