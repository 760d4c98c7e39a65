#include "msmx/nine_point.hpp"

#include <cmath>

#include "msmx/exact.hpp"
#include "msmx/preissman.hpp"

namespace msmx {

namespace {

// e_x cross v; only the transverse components survive.
Vec3 rx(const Vec3& v) { return {0.0, -v.z, v.y}; }

double& fp_comp(FieldPoint& f, int c) {
    switch (c) {
        case 0: return f.H.x;
        case 1: return f.H.y;
        case 2: return f.H.z;
        case 3: return f.E.x;
        case 4: return f.E.y;
        default: return f.E.z;
    }
}

// Source-free stencil rows at node m: the curl couplings weight the three
// time levels 1:2:1 while the medium-weighted mass terms pair next against
// prev, which is what dropping the potentials from the box scheme leaves.
std::array<double, 6> stencil_core(const Grid1D& g, const MediumProfile& med, double dt, bool periodic, int m,
                                   const std::vector<FieldPoint>& prev, const std::vector<FieldPoint>& cur,
                                   const std::vector<FieldPoint>& next) {
    const int nodes = periodic ? g.nx : g.nx + 1;
    const int mm = periodic ? (m + nodes - 1) % nodes : m - 1;
    const int mp = periodic ? (m + 1) % nodes : m + 1;
    const int cl = periodic ? (m + g.nx - 1) % g.nx : m - 1;
    const int cr = periodic ? m : m;
    const double dx = g.dx();
    const double mu_l = med.mu[cl], mu_r = med.mu[cr];
    const double eps_l = med.eps[cl], eps_r = med.eps[cr];

    const Vec3 rh = dt * rx(next[mp].E - next[mm].E) +
                    dx * (mu_l * (next[mm].H + next[m].H) + mu_r * (next[m].H + next[mp].H)) +
                    2.0 * dt * rx(cur[mp].E - cur[mm].E) + dt * rx(prev[mp].E - prev[mm].E) -
                    dx * (mu_l * (prev[mm].H + prev[m].H) + mu_r * (prev[m].H + prev[mp].H));

    const Vec3 re = -dt * rx(next[mp].H - next[mm].H) +
                    dx * (eps_l * (next[mm].E + next[m].E) + eps_r * (next[m].E + next[mp].E)) -
                    2.0 * dt * rx(cur[mp].H - cur[mm].H) - dt * rx(prev[mp].H - prev[mm].H) -
                    dx * (eps_l * (prev[mm].E + prev[m].E) + eps_r * (prev[m].E + prev[mp].E));

    return {rh.x, rh.y, rh.z, re.x, re.y, re.z};
}

std::vector<double> flatten(const std::vector<FieldPoint>& f) {
    std::vector<double> z(f.size() * 6);
    for (std::size_t i = 0; i < f.size(); ++i) {
        z[6 * i + 0] = f[i].H.x;
        z[6 * i + 1] = f[i].H.y;
        z[6 * i + 2] = f[i].H.z;
        z[6 * i + 3] = f[i].E.x;
        z[6 * i + 4] = f[i].E.y;
        z[6 * i + 5] = f[i].E.z;
    }
    return z;
}

std::vector<FieldPoint> unflatten(const std::vector<double>& z) {
    std::vector<FieldPoint> f(z.size() / 6);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i].H = {z[6 * i + 0], z[6 * i + 1], z[6 * i + 2]};
        f[i].E = {z[6 * i + 3], z[6 * i + 4], z[6 * i + 5]};
    }
    return f;
}

}  // namespace

NinePointSystem assemble_nine_point(const Grid1D& grid, const MediumProfile& medium, double dt, bool periodic) {
    medium.validate(grid.nx);
    if (dt == 0.0) throw ValidationError("nine-point assembly: dt must be nonzero");
    if (periodic && grid.nx < 3) throw ValidationError("nine-point assembly: periodic grids need at least 3 cells");
    const int nodes = periodic ? grid.nx : grid.nx + 1;
    const int bw = periodic ? grid.nx - 1 : 1;
    NinePointSystem sys{BandedBlockMatrix(nodes, 6, bw), BandedBlockMatrix(nodes, 6, bw),
                        BandedBlockMatrix(nodes, 6, bw)};

    std::vector<FieldPoint> zero(nodes), probe(nodes);
    const int m_lo = periodic ? 0 : 1;
    const int m_hi = periodic ? nodes - 1 : grid.nx - 1;
    for (int m = m_lo; m <= m_hi; ++m) {
        for (int dn = -1; dn <= 1; ++dn) {
            const int nb = periodic ? (m + dn + nodes) % nodes : m + dn;
            for (int comp = 0; comp < 6; ++comp) {
                fp_comp(probe[nb], comp) = 1.0;
                const auto an = stencil_core(grid, medium, dt, periodic, m, zero, zero, probe);
                const auto bc = stencil_core(grid, medium, dt, periodic, m, zero, probe, zero);
                const auto cp = stencil_core(grid, medium, dt, periodic, m, probe, zero, zero);
                fp_comp(probe[nb], comp) = 0.0;
                for (int r = 0; r < 6; ++r) {
                    if (an[r] != 0.0) sys.A.at(m, nb, r, comp) = an[r];
                    if (bc[r] != 0.0) sys.B.at(m, nb, r, comp) = -bc[r];
                    if (cp[r] != 0.0) sys.C.at(m, nb, r, comp) = -cp[r];
                }
            }
        }
    }
    if (!periodic) {
        for (int c = 0; c < 6; ++c) {
            sys.A.at(0, 0, c, c) = 1.0;
            sys.A.at(grid.nx, grid.nx, c, c) = 1.0;
        }
    }
    return sys;
}

NinePointScheme::NinePointScheme(const Grid1D& grid, MediumProfile medium, SourceProfile src, BoundarySpec bc,
                                 double dt_signed)
    : grid_(grid),
      medium_(std::move(medium)),
      src_(std::move(src)),
      bc_(bc),
      dt_(dt_signed == 0.0 ? grid.dt : dt_signed),
      periodic_(bc.kind == BoundarySpec::Kind::periodic),
      nodes_(periodic_ ? grid.nx : grid.nx + 1),
      sys_(assemble_nine_point(grid_, medium_, dt_, periodic_)) {
    if (src_.K)
        throw ValidationError("nine-point scheme: magnetic currents are not representable after elimination");
    if (periodic_ && grid_.nx % 2 == 0)
        throw ValidationError("nine-point scheme: periodic runs need an odd cell count (alternating null mode)");
    if (bc_.kind == BoundarySpec::Kind::dirichlet_exact && !medium_.spatially_constant())
        throw ValidationError("nine-point scheme: dirichlet_exact boundaries need a spatially constant medium");
    sys_.A.scalar().factor();
}

void NinePointScheme::check_level(const FieldLevel& lvl) const {
    if (static_cast<int>(lvl.f.size()) != nodes_)
        throw ValidationError("nine-point scheme: level does not match the solver's grid");
}

FieldLevel NinePointScheme::sample_exact(double t) const {
    if (!medium_.spatially_constant())
        throw ValidationError("nine-point scheme: exact sampling needs a spatially constant medium");
    FieldLevel lvl{t, std::vector<FieldPoint>(nodes_)};
    for (int i = 0; i < nodes_; ++i) lvl.f[i] = exact_plane_wave(grid_.node(i), t, medium_.eps[0], medium_.mu[0]);
    return lvl;
}

std::pair<FieldLevel, FieldLevel> NinePointScheme::bootstrap_exact(double t0) const {
    return {sample_exact(t0), sample_exact(t0 + dt_)};
}

std::pair<FieldLevel, FieldLevel> NinePointScheme::bootstrap_sampled(const std::vector<FieldPoint>& nodal,
                                                                     double t0) const {
    PreissmanStepper box(grid_, medium_, src_, bc_, dt_);
    const PreissmanLevel a = box.initial_sampled(nodal, t0);
    const PreissmanLevel b = box.step(a);
    return {FieldLevel{t0, nodal}, FieldLevel{b.t, box.nodal_states(b)}};
}

FieldLevel NinePointScheme::step(const FieldLevel& prev, const FieldLevel& cur) {
    check_level(prev);
    check_level(cur);
    const double tn = cur.t + dt_;

    std::vector<double> rhs = sys_.B.matvec(flatten(cur.f));
    const std::vector<double> cp = sys_.C.matvec(flatten(prev.f));
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += cp[i];

    if (src_.J) {
        const int m_lo = periodic_ ? 0 : 1;
        const int m_hi = periodic_ ? nodes_ - 1 : grid_.nx - 1;
        for (int m = m_lo; m <= m_hi; ++m) {
            const Vec3 s = source_term(m, prev.t, cur.t, tn);
            rhs[6 * m + 3] -= s.x;
            rhs[6 * m + 4] -= s.y;
            rhs[6 * m + 5] -= s.z;
        }
    }

    if (!periodic_) {
        FieldPoint left = bc_.left, right = bc_.right;
        if (bc_.kind == BoundarySpec::Kind::dirichlet_exact) {
            left = exact_plane_wave(grid_.node(0), tn, medium_.eps[0], medium_.mu[0]);
            right = exact_plane_wave(grid_.node(grid_.nx), tn, medium_.eps[0], medium_.mu[0]);
        }
        for (int c = 0; c < 3; ++c) {
            rhs[c] = left.H[c];
            rhs[3 + c] = left.E[c];
            rhs[6 * grid_.nx + c] = right.H[c];
            rhs[6 * grid_.nx + 3 + c] = right.E[c];
        }
    }

    sys_.A.solve(rhs);
    return {tn, unflatten(rhs)};
}

Vec3 NinePointScheme::source_term(int m, double tp, double tc, double tn) const {
    const int nx = grid_.nx;
    const int cl = periodic_ ? (m + nx - 1) % nx : m - 1;
    const int cr = periodic_ ? m : m;
    Vec3 s{};
    for (int c : {cl, cr}) {
        const double xa = grid_.node(c), xb = grid_.node(c + 1);
        s += box_sources(src_, xa, xb, tp, tc).j;
        s += box_sources(src_, xa, xb, tc, tn).j;
    }
    return (2.0 * dt_ * grid_.dx()) * s;
}

std::array<double, 6> NinePointScheme::residual_rows(int m, const FieldLevel& prev, const FieldLevel& cur,
                                                     const FieldLevel& next, bool with_sources) const {
    auto rows = stencil_core(grid_, medium_, dt_, periodic_, m, prev.f, cur.f, next.f);
    if (with_sources && src_.J) {
        const Vec3 s = source_term(m, prev.t, cur.t, next.t);
        rows[3] += s.x;
        rows[4] += s.y;
        rows[5] += s.z;
    }
    return rows;
}

std::array<double, 6> NinePointScheme::stencil_residual(const FieldLevel& prev, const FieldLevel& cur,
                                                        const FieldLevel& next, int m) const {
    check_level(prev);
    check_level(cur);
    check_level(next);
    const bool interior = periodic_ ? (m >= 0 && m < nodes_) : (m >= 1 && m <= grid_.nx - 1);
    if (!interior) throw ValidationError("nine-point scheme: stencil node out of range");
    return residual_rows(m, prev, cur, next, true);
}

FieldLevel nine_point_step(const Grid1D& grid, const MediumProfile& medium, const SourceProfile& src,
                           const BoundarySpec& bc, const FieldLevel& prev, const FieldLevel& cur) {
    NinePointScheme scheme(grid, medium, src, bc);
    return scheme.step(prev, cur);
}

}  // namespace msmx
