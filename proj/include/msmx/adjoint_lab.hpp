#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "msmx/core.hpp"

namespace msmx {

// Fully periodic space-time sampling: n points per spatial axis over a cubic
// box, nt points over the time horizon. Periodicity makes the central
// differences below exactly skew (spatial) and lets divergence terms drop
// from summation by parts with no boundary remainder.
struct SpaceTimeGrid {
    int n = 0;
    int nt = 0;
    double box = 0.0;
    double horizon = 0.0;

    SpaceTimeGrid() = default;
    SpaceTimeGrid(int n_, int nt_, double box_, double horizon_);

    [[nodiscard]] double dx() const { return box / n; }
    [[nodiscard]] double dt() const { return horizon / nt; }
    [[nodiscard]] std::size_t points() const {
        return static_cast<std::size_t>(n) * n * n * nt;
    }
    // Six-component fields, component-major, time fastest.
    [[nodiscard]] std::size_t size() const { return 6 * points(); }
    [[nodiscard]] std::size_t idx(int c, int i, int j, int k, int m) const {
        return (((static_cast<std::size_t>(c) * n + i) * n + j) * n + k) * nt + m;
    }
    [[nodiscard]] std::size_t pidx(int i, int j, int k, int m) const {
        return ((static_cast<std::size_t>(i) * n + j) * n + k) * nt + m;
    }
    [[nodiscard]] double x(int i) const { return dx() * i; }
    [[nodiscard]] double y(int j) const { return dx() * j; }
    [[nodiscard]] double z(int k) const { return dx() * k; }
    [[nodiscard]] double t(int m) const { return dt() * m; }
};

enum class OpKind { G, G1, G2 };

using MediumFn = std::function<double(double, double, double, double)>;

// A linear operator on sampled 6-component fields: a stencil-driven
// matrix-free apply, plus an explicitly assembled sparse matrix once
// assemble() has run. The adjoint constructions require the matrix.
class GridOperator {
  public:
    [[nodiscard]] std::vector<double> apply(const std::vector<double>& u) const;
    void assemble();
    [[nodiscard]] bool assembled() const { return matrix_.has_value(); }
    [[nodiscard]] const Eigen::SparseMatrix<double>& matrix() const;

    [[nodiscard]] const SpaceTimeGrid& grid() const { return grid_; }
    [[nodiscard]] OpKind kind() const { return kind_; }
    [[nodiscard]] bool is_adjoint() const { return adjoint_; }
    [[nodiscard]] const std::string& medium_label() const { return medium_; }

  private:
    friend GridOperator discretize_operator(OpKind, const SpaceTimeGrid&, const MediumFn&,
                                            const MediumFn&, const std::string&);
    friend GridOperator discretize_formal_adjoint_G(const SpaceTimeGrid&, const MediumFn&,
                                                    const MediumFn&, const std::string&);
    friend GridOperator adjoint_matrix(const GridOperator&);

    // One stencil contribution: out_c += sign * coef * D_axis D_t^torder u_in.
    // axis 0..2 is a central spatial difference, 3 means none; torder is the
    // time-derivative order (0, 1, or 2, all central). coef indexes a sampled
    // coefficient field, -1 for the constant 1.
    struct Term {
        int out_c, in_c, axis, torder, coef;
        double sign;
    };

    GridOperator(SpaceTimeGrid g, OpKind k, bool adj, std::string med)
        : grid_(g), kind_(k), adjoint_(adj), medium_(std::move(med)) {}

    template <typename Sink>
    void for_each_entry(Sink&& sink) const;

    SpaceTimeGrid grid_;
    OpKind kind_ = OpKind::G;
    bool adjoint_ = false;
    std::string medium_;
    std::vector<Term> terms_;
    std::vector<std::vector<double>> coefs_;
    std::optional<Eigen::SparseMatrix<double>> matrix_;
};

// Central-difference discretization of the first-order curl/time operator
// (G), its medium-scaled variant (G1), or the second-order potential form
// (G2), over a periodic space-time grid. Media are sampled pointwise and
// must stay positive; the spatial resolution must be at least 8 per axis.
GridOperator discretize_operator(OpKind kind, const SpaceTimeGrid& grid, const MediumFn& eps,
                                 const MediumFn& mu, const std::string& medium_label = "");

// The formal adjoint of G written as an operator in its own right: curl
// blocks carry over (the periodic central-difference curl is exactly
// symmetric), time blocks swap with flipped sign and pick up the medium's
// time derivative, discretized centrally from the samples. For
// time-independent media this matches the sparse transpose of G exactly.
GridOperator discretize_formal_adjoint_G(const SpaceTimeGrid& grid, const MediumFn& eps,
                                         const MediumFn& mu, const std::string& medium_label = "");

// The operator realized by the transpose of an assembled matrix. Requires
// assemble() to have run on the input.
GridOperator adjoint_matrix(const GridOperator& op);

// Action of the symmetry test functional: S(psi, phi) = <psi, op phi> under
// the periodic Riemann sum.
double vainberg_action(const GridOperator& op, const std::vector<double>& psi,
                       const std::vector<double>& phi);

// Symmetry defect S(psi, phi) - S(phi, psi); zero exactly when the assembled
// matrix is symmetric, which is the discrete self-adjointness criterion.
double vainberg_defect(const GridOperator& op, const std::vector<double>& psi,
                       const std::vector<double>& phi);

// Central-difference Frechet probe (N(u + h phi) - N(u - h phi)) / (2h).
// For a linear map this reproduces N(phi) up to rounding, independent of u
// and h; that identity is what makes the operators above their own
// derivatives.
std::vector<double> frechet_apply(
    const std::function<std::vector<double>(const std::vector<double>&)>& map,
    const std::vector<double>& u, const std::vector<double>& phi, double h);

// Quadratic correction form predicted for the medium-scaled variant: the
// defect of G1 equals, to second order, the Riemann sum of
// psi_H . (A phi_H) + psi_E . (B phi_E) with A = -[grad(1/eps)]x and
// B = -[grad(1/mu)]x. Gradients are supplied analytically so the comparison
// has an independent reference.
using GradFn = std::function<Vec3(double, double, double, double)>;
double ab_correction_form(const SpaceTimeGrid& grid, const GradFn& grad_inv_eps,
                          const GradFn& grad_inv_mu, const std::vector<double>& psi,
                          const std::vector<double>& phi);

// Deterministic smooth periodic test field: per component, a few random
// low-mode trigonometric products. The closure depends only on the seed and
// the periods, so refining a grid resamples the same continuum function.
std::function<double(int, double, double, double, double)> random_field_function(std::uint64_t seed,
                                                                                 double box,
                                                                                 double horizon);

std::vector<double> sample_field(const SpaceTimeGrid& grid,
                                 const std::function<double(int, double, double, double, double)>& f);

}  // namespace msmx
