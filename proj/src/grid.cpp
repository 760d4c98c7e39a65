#include "msmx/grid.hpp"

#include <cmath>

#include "msmx/errors.hpp"

namespace msmx {

MediumProfile MediumProfile::constant(const Grid1D& g, double eps_value, double mu_value) {
    MediumProfile m;
    m.eps.assign(static_cast<std::size_t>(g.nx), eps_value);
    m.mu.assign(static_cast<std::size_t>(g.nx), mu_value);
    m.validate(g.nx);
    return m;
}

MediumProfile MediumProfile::from_functions(const Grid1D& g, const std::function<double(double)>& eps_fn,
                                            const std::function<double(double)>& mu_fn) {
    if (!eps_fn || !mu_fn) throw ValidationError("medium: both eps and mu functions are required");
    MediumProfile m;
    m.eps.resize(static_cast<std::size_t>(g.nx));
    m.mu.resize(static_cast<std::size_t>(g.nx));
    for (int i = 0; i < g.nx; ++i) {
        m.eps[static_cast<std::size_t>(i)] = eps_fn(g.cell(i));
        m.mu[static_cast<std::size_t>(i)] = mu_fn(g.cell(i));
    }
    m.validate(g.nx);
    return m;
}

bool MediumProfile::spatially_constant(double tol) const {
    if (eps.empty()) return true;
    for (std::size_t i = 1; i < eps.size(); ++i) {
        if (std::abs(eps[i] - eps[0]) > tol * std::abs(eps[0])) return false;
        if (std::abs(mu[i] - mu[0]) > tol * std::abs(mu[0])) return false;
    }
    return true;
}

void MediumProfile::validate(int nx) const {
    if (eps.size() != static_cast<std::size_t>(nx) || mu.size() != static_cast<std::size_t>(nx)) {
        throw ValidationError("medium: sample count does not match the grid");
    }
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) throw ValidationError("medium: eps must be positive");
        if (!(mu[i] > 0.0) || !std::isfinite(mu[i])) throw ValidationError("medium: mu must be positive");
    }
}

double MediumProfile::node_value(const std::vector<double>& cell_vals, int i, bool periodic) const {
    const int n = static_cast<int>(cell_vals.size());
    if (periodic) {
        const int left = ((i - 1) % n + n) % n;
        const int right = (i % n + n) % n;
        return 0.5 * (cell_vals[static_cast<std::size_t>(left)] + cell_vals[static_cast<std::size_t>(right)]);
    }
    if (i <= 0) return cell_vals.front();
    if (i >= n) return cell_vals.back();
    return 0.5 * (cell_vals[static_cast<std::size_t>(i - 1)] + cell_vals[static_cast<std::size_t>(i)]);
}

SourceProfile SourceProfile::zero() { return SourceProfile{}; }

}  // namespace msmx
