#pragma once

#include <functional>
#include <vector>

#include "msmx/core.hpp"

namespace msmx {

// Uniform 1+1D grid. Nodes x_i = x0 + i*dx for i = 0..nx; cells (half-integer
// points) sit at x0 + (i+1/2)*dx for i = 0..nx-1. Periodic runs identify node
// nx with node 0.
struct Grid1D {
    double x0 = 0.0;
    double length = 0.0;
    int nx = 0;       // number of cells
    double dt = 0.0;  // time step (sign carried by the stepping routines)
    int nt = 0;       // step count when a run length is bound to the grid; 0 if unbound

    Grid1D() = default;
    Grid1D(double x0_, double length_, int nx_, double dt_) : x0(x0_), length(length_), nx(nx_), dt(dt_) {
        if (!(length > 0.0)) throw ValidationError("grid: length must be positive");
        if (nx < 2) throw ValidationError("grid: nx must be at least 2");
        if (!(dt > 0.0)) throw ValidationError("grid: dt must be positive");
    }

    [[nodiscard]] double dx() const { return length / nx; }
    [[nodiscard]] double node(int i) const { return x0 + dx() * i; }
    [[nodiscard]] double cell(int i) const { return x0 + dx() * (i + 0.5); }
};

// Isotropic lossless medium sampled at cell midpoints, which is where the box
// discretization needs it. Values must stay positive.
struct MediumProfile {
    std::vector<double> eps;  // size nx
    std::vector<double> mu;   // size nx

    static MediumProfile constant(const Grid1D& g, double eps_value, double mu_value);
    static MediumProfile from_functions(const Grid1D& g, const std::function<double(double)>& eps_fn,
                                        const std::function<double(double)>& mu_fn);

    [[nodiscard]] bool spatially_constant(double tol = 1e-14) const;
    void validate(int nx) const;

    // Node-sampled medium, defined as the mean of the two adjacent cell values
    // (end nodes copy their single neighbour). Used by diagnostics only.
    [[nodiscard]] double eps_node(int i, bool periodic) const { return node_value(eps, i, periodic); }
    [[nodiscard]] double mu_node(int i, bool periodic) const { return node_value(mu, i, periodic); }

  private:
    [[nodiscard]] double node_value(const std::vector<double>& cell_vals, int i, bool periodic) const;
};

// Current sources: J is the electric current, K the (formal) magnetic current.
// Both are functions of (x, t); zero by default.
struct SourceProfile {
    std::function<Vec3(double, double)> J;
    std::function<Vec3(double, double)> K;

    static SourceProfile zero();
    [[nodiscard]] bool is_zero() const { return !J && !K; }
    [[nodiscard]] Vec3 j_at(double x, double t) const { return J ? J(x, t) : Vec3{}; }
    [[nodiscard]] Vec3 k_at(double x, double t) const { return K ? K(x, t) : Vec3{}; }
};

}  // namespace msmx
