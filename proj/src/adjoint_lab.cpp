#include "msmx/adjoint_lab.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <utility>

#include "msmx/errors.hpp"
#include "msmx/rng.hpp"

namespace msmx {

namespace {

int wrap(int i, int n) { return i >= n ? i - n : (i < 0 ? i + n : i); }

std::vector<double> sample_medium(const SpaceTimeGrid& g, const MediumFn& f, const char* name) {
    if (!f) throw ValidationError(std::string("operator medium: ") + name + " is not callable");
    std::vector<double> s(g.points());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                for (int m = 0; m < g.nt; ++m) {
                    const double v = f(g.x(i), g.y(j), g.z(k), g.t(m));
                    if (!(v > 0.0))
                        throw ValidationError(std::string("operator medium: ") + name +
                                              " must stay positive on the grid");
                    s[g.pidx(i, j, k, m)] = v;
                }
    return s;
}

// Central time difference of a sampled coefficient, periodic in time.
std::vector<double> time_difference(const SpaceTimeGrid& g, const std::vector<double>& s) {
    std::vector<double> d(g.points());
    const double i2dt = 1.0 / (2.0 * g.dt());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                for (int m = 0; m < g.nt; ++m) {
                    const std::size_t p = g.pidx(i, j, k, m);
                    const std::size_t pp = g.pidx(i, j, k, wrap(m + 1, g.nt));
                    const std::size_t pm = g.pidx(i, j, k, wrap(m - 1, g.nt));
                    d[p] = (s[pp] - s[pm]) * i2dt;
                }
    return d;
}

}  // namespace

SpaceTimeGrid::SpaceTimeGrid(int n_, int nt_, double box_, double horizon_)
    : n(n_), nt(nt_), box(box_), horizon(horizon_) {
    if (n < 8) throw ValidationError("operator grid: need at least 8 samples per spatial axis");
    if (nt < 4) throw ValidationError("operator grid: need at least 4 time samples");
    if (!(box > 0.0) || !(horizon > 0.0))
        throw ValidationError("operator grid: periods must be positive");
}

template <typename Sink>
void GridOperator::for_each_entry(Sink&& sink) const {
    const SpaceTimeGrid& g = grid_;
    const double i2dx = 1.0 / (2.0 * g.dx());
    const double i2dt = 1.0 / (2.0 * g.dt());
    const double idt2 = 1.0 / (g.dt() * g.dt());

    for (const Term& tm : terms_) {
        // Stencil offsets along the (optional) spatial axis and in time.
        std::array<std::pair<int, double>, 2> sp;
        int nsp = 0;
        if (tm.axis < 3) {
            sp[0] = {+1, +i2dx};
            sp[1] = {-1, -i2dx};
            nsp = 2;
        } else {
            sp[0] = {0, 1.0};
            nsp = 1;
        }
        std::array<std::pair<int, double>, 3> tp;
        int ntp = 0;
        switch (tm.torder) {
            case 0:
                tp[0] = {0, 1.0};
                ntp = 1;
                break;
            case 1:
                tp[0] = {+1, +i2dt};
                tp[1] = {-1, -i2dt};
                ntp = 2;
                break;
            default:
                tp[0] = {+1, idt2};
                tp[1] = {0, -2.0 * idt2};
                tp[2] = {-1, idt2};
                ntp = 3;
                break;
        }
        const std::vector<double>* coef = tm.coef >= 0 ? &coefs_[tm.coef] : nullptr;

        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < g.n; ++k)
                    for (int m = 0; m < g.nt; ++m) {
                        const std::size_t row = g.idx(tm.out_c, i, j, k, m);
                        const double cv =
                            tm.sign * (coef ? (*coef)[g.pidx(i, j, k, m)] : 1.0);
                        for (int a = 0; a < nsp; ++a) {
                            int si = i, sj = j, sk = k;
                            if (tm.axis == 0)
                                si = wrap(i + sp[a].first, g.n);
                            else if (tm.axis == 1)
                                sj = wrap(j + sp[a].first, g.n);
                            else if (tm.axis == 2)
                                sk = wrap(k + sp[a].first, g.n);
                            for (int b = 0; b < ntp; ++b) {
                                const std::size_t col =
                                    g.idx(tm.in_c, si, sj, sk, wrap(m + tp[b].first, g.nt));
                                sink(row, col, cv * sp[a].second * tp[b].second);
                            }
                        }
                    }
    }
}

std::vector<double> GridOperator::apply(const std::vector<double>& u) const {
    if (u.size() != grid_.size())
        throw ValidationError("grid operator: field does not match the operator grid");
    std::vector<double> out(grid_.size(), 0.0);
    if (!terms_.empty()) {
        for_each_entry([&](std::size_t row, std::size_t col, double v) { out[row] += v * u[col]; });
        return out;
    }
    const Eigen::SparseMatrix<double>& a = matrix();
    Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = a * uv;
    return out;
}

void GridOperator::assemble() {
    if (matrix_) return;
    std::vector<Eigen::Triplet<double>> trips;
    std::size_t count = 0;
    for_each_entry([&](std::size_t, std::size_t, double) { ++count; });
    trips.reserve(count);
    for_each_entry([&](std::size_t row, std::size_t col, double v) {
        trips.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
    });
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(grid_.size()),
                                  static_cast<Eigen::Index>(grid_.size()));
    m.setFromTriplets(trips.begin(), trips.end());
    matrix_ = std::move(m);
}

const Eigen::SparseMatrix<double>& GridOperator::matrix() const {
    if (!matrix_) throw ValidationError("grid operator: matrix not assembled");
    return *matrix_;
}

namespace {

// Curl stencil as (out component, in component, derivative axis, sign):
// (curl u)_0 = d_y u_2 - d_z u_1 and cyclic.
struct CurlEntry {
    int oc, ic, ax;
    double s;
};
constexpr std::array<CurlEntry, 6> kCurl = {{{0, 1, 2, -1.0},
                                             {0, 2, 1, +1.0},
                                             {1, 0, 2, +1.0},
                                             {1, 2, 0, -1.0},
                                             {2, 0, 1, -1.0},
                                             {2, 1, 0, +1.0}}};

}  // namespace

GridOperator discretize_operator(OpKind kind, const SpaceTimeGrid& grid, const MediumFn& eps,
                                 const MediumFn& mu, const std::string& medium_label) {
    GridOperator op(grid, kind, false, medium_label);
    std::vector<double> se = sample_medium(grid, eps, "eps");
    std::vector<double> sm = sample_medium(grid, mu, "mu");

    auto add_curl = [&op](int ob, int ib, int coef, int torder, double scale) {
        for (const CurlEntry& e : kCurl)
            op.terms_.push_back({ob + e.oc, ib + e.ic, e.ax, torder, coef, scale * e.s});
    };

    switch (kind) {
        case OpKind::G:
            // [ curl      -eps d_t ]
            // [ mu d_t    curl     ]
            op.coefs_ = {std::move(se), std::move(sm)};
            add_curl(0, 0, -1, 0, 1.0);
            add_curl(3, 3, -1, 0, 1.0);
            for (int c = 0; c < 3; ++c) {
                op.terms_.push_back({c, 3 + c, 3, 1, 0, -1.0});
                op.terms_.push_back({3 + c, c, 3, 1, 1, +1.0});
            }
            break;
        case OpKind::G1: {
            // [ (1/eps) curl   d_t           ]
            // [ -d_t           (1/mu) curl   ]
            for (double& v : se) v = 1.0 / v;
            for (double& v : sm) v = 1.0 / v;
            op.coefs_ = {std::move(se), std::move(sm)};
            add_curl(0, 0, 0, 0, 1.0);
            add_curl(3, 3, 1, 0, 1.0);
            for (int c = 0; c < 3; ++c) {
                op.terms_.push_back({c, 3 + c, 3, 1, -1, +1.0});
                op.terms_.push_back({3 + c, c, 3, 1, -1, -1.0});
            }
            break;
        }
        case OpKind::G2:
            // [ mu d_tt     curl d_t ]
            // [ -curl d_t   eps d_tt ]
            op.coefs_ = {std::move(se), std::move(sm)};
            for (int c = 0; c < 3; ++c) {
                op.terms_.push_back({c, c, 3, 2, 1, +1.0});
                op.terms_.push_back({3 + c, 3 + c, 3, 2, 0, +1.0});
            }
            add_curl(0, 3, -1, 1, +1.0);
            add_curl(3, 0, -1, 1, -1.0);
            break;
    }
    return op;
}

GridOperator discretize_formal_adjoint_G(const SpaceTimeGrid& grid, const MediumFn& eps,
                                         const MediumFn& mu, const std::string& medium_label) {
    GridOperator op(grid, OpKind::G, true, medium_label);
    std::vector<double> se = sample_medium(grid, eps, "eps");
    std::vector<double> sm = sample_medium(grid, mu, "mu");
    op.coefs_ = {se, sm, time_difference(grid, se), time_difference(grid, sm)};

    // [ curl                  -mu d_t - (d_t mu) ]
    // [ eps d_t + (d_t eps)   curl               ]
    for (const CurlEntry& e : kCurl) {
        op.terms_.push_back({e.oc, e.ic, e.ax, 0, -1, e.s});
        op.terms_.push_back({3 + e.oc, 3 + e.ic, e.ax, 0, -1, e.s});
    }
    for (int c = 0; c < 3; ++c) {
        op.terms_.push_back({c, 3 + c, 3, 1, 1, -1.0});
        op.terms_.push_back({c, 3 + c, 3, 0, 3, -1.0});
        op.terms_.push_back({3 + c, c, 3, 1, 0, +1.0});
        op.terms_.push_back({3 + c, c, 3, 0, 2, +1.0});
    }
    return op;
}

GridOperator adjoint_matrix(const GridOperator& op) {
    if (!op.assembled())
        throw ValidationError("adjoint: operator matrix not assembled; call assemble() first");
    GridOperator adj(op.grid_, op.kind_, !op.adjoint_, op.medium_);
    adj.matrix_ = Eigen::SparseMatrix<double>(op.matrix_->transpose());
    return adj;
}

double vainberg_action(const GridOperator& op, const std::vector<double>& psi,
                       const std::vector<double>& phi) {
    if (psi.size() != op.grid().size() || phi.size() != op.grid().size())
        throw ValidationError("vainberg action: fields do not match the operator grid");
    const std::vector<double> w = op.apply(phi);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += psi[i] * w[i];
    const SpaceTimeGrid& g = op.grid();
    return acc * g.dx() * g.dx() * g.dx() * g.dt();
}

double vainberg_defect(const GridOperator& op, const std::vector<double>& psi,
                       const std::vector<double>& phi) {
    return vainberg_action(op, psi, phi) - vainberg_action(op, phi, psi);
}

std::vector<double> frechet_apply(
    const std::function<std::vector<double>(const std::vector<double>&)>& map,
    const std::vector<double>& u, const std::vector<double>& phi, double h) {
    if (!map) throw ValidationError("frechet probe: map is not callable");
    if (u.size() != phi.size())
        throw ValidationError("frechet probe: state and direction sizes differ");
    if (!(h != 0.0) || !std::isfinite(h))
        throw ValidationError("frechet probe: step must be finite and nonzero");
    std::vector<double> up(u.size()), um(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        up[i] = u[i] + h * phi[i];
        um[i] = u[i] - h * phi[i];
    }
    std::vector<double> fp = map(up);
    std::vector<double> fm = map(um);
    if (fp.size() != fm.size()) throw ValidationError("frechet probe: map output size changed");
    std::vector<double> out(fp.size());
    const double s = 1.0 / (2.0 * h);
    for (std::size_t i = 0; i < fp.size(); ++i) out[i] = (fp[i] - fm[i]) * s;
    return out;
}

double ab_correction_form(const SpaceTimeGrid& grid, const GradFn& grad_inv_eps,
                          const GradFn& grad_inv_mu, const std::vector<double>& psi,
                          const std::vector<double>& phi) {
    if (psi.size() != grid.size() || phi.size() != grid.size())
        throw ValidationError("correction form: fields do not match the grid");
    if (!grad_inv_eps || !grad_inv_mu)
        throw ValidationError("correction form: gradients are not callable");
    double acc = 0.0;
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            for (int k = 0; k < grid.n; ++k)
                for (int m = 0; m < grid.nt; ++m) {
                    const double xc = grid.x(i), yc = grid.y(j), zc = grid.z(k), tc = grid.t(m);
                    Vec3 ph, pe, qh, qe;
                    for (int c = 0; c < 3; ++c) {
                        ph[c] = psi[grid.idx(c, i, j, k, m)];
                        pe[c] = psi[grid.idx(3 + c, i, j, k, m)];
                        qh[c] = phi[grid.idx(c, i, j, k, m)];
                        qe[c] = phi[grid.idx(3 + c, i, j, k, m)];
                    }
                    acc -= dot(ph, cross(grad_inv_eps(xc, yc, zc, tc), qh));
                    acc -= dot(pe, cross(grad_inv_mu(xc, yc, zc, tc), qe));
                }
    return acc * grid.dx() * grid.dx() * grid.dx() * grid.dt();
}

std::function<double(int, double, double, double, double)> random_field_function(std::uint64_t seed,
                                                                                 double box,
                                                                                 double horizon) {
    if (!(box > 0.0) || !(horizon > 0.0))
        throw ValidationError("random field: periods must be positive");
    struct Mode {
        double amp, px, py, pz, pt;
        int kx, ky, kz, kt;
    };
    constexpr int kModes = 3;
    auto modes = std::make_shared<std::array<Mode, 6 * kModes>>();
    Rng rng(seed);
    int q = 0;
    for (Mode& md : *modes) {
        md.amp = rng.symmetric(1.0);
        // The leading mode of every component sits at wavenumber 1 in all
        // four directions; otherwise two independently seeded fields can be
        // exactly orthogonal under the discrete product sums, which would
        // silence the bilinear diagnostics these fields are made for.
        const bool lead = q++ % kModes == 0;
        md.kx = lead ? 1 : static_cast<int>(rng.uniform() * 3.0);
        md.ky = lead ? 1 : static_cast<int>(rng.uniform() * 3.0);
        md.kz = lead ? 1 : static_cast<int>(rng.uniform() * 3.0);
        md.kt = lead ? 1 : static_cast<int>(rng.uniform() * 3.0);
        md.px = rng.uniform(0.0, 2.0 * M_PI);
        md.py = rng.uniform(0.0, 2.0 * M_PI);
        md.pz = rng.uniform(0.0, 2.0 * M_PI);
        md.pt = rng.uniform(0.0, 2.0 * M_PI);
    }
    const double wx = 2.0 * M_PI / box;
    const double wt = 2.0 * M_PI / horizon;
    return [modes, wx, wt](int c, double x, double y, double z, double t) {
        double v = 0.0;
        for (int q = 0; q < kModes; ++q) {
            const Mode& md = (*modes)[static_cast<std::size_t>(c) * kModes + q];
            v += md.amp * std::cos(wx * md.kx * x + md.px) * std::cos(wx * md.ky * y + md.py) *
                 std::cos(wx * md.kz * z + md.pz) * std::cos(wt * md.kt * t + md.pt);
        }
        return v;
    };
}

std::vector<double> sample_field(
    const SpaceTimeGrid& grid,
    const std::function<double(int, double, double, double, double)>& f) {
    if (!f) throw ValidationError("sample field: function is not callable");
    std::vector<double> u(grid.size());
    for (int c = 0; c < 6; ++c)
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j)
                for (int k = 0; k < grid.n; ++k)
                    for (int m = 0; m < grid.nt; ++m)
                        u[grid.idx(c, i, j, k, m)] = f(c, grid.x(i), grid.y(j), grid.z(k), grid.t(m));
    return u;
}

}  // namespace msmx
