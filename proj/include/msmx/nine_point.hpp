#pragma once

#include <array>
#include <utility>
#include <vector>

#include "msmx/banded.hpp"
#include "msmx/scheme_common.hpp"

namespace msmx {

// Two-step scheme for nodal (H, E) alone, obtained by eliminating the
// potentials and momenta from the box discretization. Each interior node
// couples to its neighbours at three time levels: A z_next = B z_cur +
// C z_prev + sources, with 6x6 blocks ordered (H, E).
struct NinePointSystem {
    BandedBlockMatrix A, B, C;
};

// Builds the three matrices. Non-periodic systems get identity rows for the
// two boundary blocks in A (and zero rows in B, C); the caller injects the
// boundary values through the right-hand side. Periodic systems wrap, which
// makes the band block-dense.
NinePointSystem assemble_nine_point(const Grid1D& grid, const MediumProfile& medium, double dt, bool periodic);

// Time stepper over the eliminated system. Restrictions inherited from the
// elimination: no magnetic current (src.K must be unset), and periodic grids
// need an odd cell count, else an alternating mode sits in A's null space.
// dirichlet_exact boundaries need a spatially constant medium.
class NinePointScheme {
  public:
    NinePointScheme(const Grid1D& grid, MediumProfile medium, SourceProfile src, BoundarySpec bc,
                    double dt_signed = 0.0);

    [[nodiscard]] const Grid1D& grid() const { return grid_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] int nodes() const { return nodes_; }

    // Nodal plane-wave samples; constant media only.
    [[nodiscard]] FieldLevel sample_exact(double t) const;

    // The two starting levels a two-step scheme needs. bootstrap_exact
    // samples the closed form at t0 and t0 + dt; bootstrap_sampled runs one
    // box-scheme step on the given nodal data, so arbitrary initial fields
    // and media work without a closed form.
    [[nodiscard]] std::pair<FieldLevel, FieldLevel> bootstrap_exact(double t0) const;
    [[nodiscard]] std::pair<FieldLevel, FieldLevel> bootstrap_sampled(const std::vector<FieldPoint>& nodal,
                                                                      double t0) const;

    FieldLevel step(const FieldLevel& prev, const FieldLevel& cur);

    // The six stencil components at node m given three consecutive levels;
    // zero (to rounding) whenever the levels come from this scheme, and
    // within truncation error for trajectories of the continuous system.
    // Non-periodic m must be interior.
    [[nodiscard]] std::array<double, 6> stencil_residual(const FieldLevel& prev, const FieldLevel& cur,
                                                         const FieldLevel& next, int m) const;

  private:
    [[nodiscard]] std::array<double, 6> residual_rows(int m, const FieldLevel& prev, const FieldLevel& cur,
                                                      const FieldLevel& next, bool with_sources) const;
    [[nodiscard]] Vec3 source_term(int m, double tp, double tc, double tn) const;
    void check_level(const FieldLevel& lvl) const;

    Grid1D grid_;
    MediumProfile medium_;
    SourceProfile src_;
    BoundarySpec bc_;
    double dt_ = 0.0;
    bool periodic_ = false;
    int nodes_ = 0;
    NinePointSystem sys_;
};

// Convenience facade: advance one step from two nodal levels.
FieldLevel nine_point_step(const Grid1D& grid, const MediumProfile& medium, const SourceProfile& src,
                           const BoundarySpec& bc, const FieldLevel& prev, const FieldLevel& cur);

}  // namespace msmx
