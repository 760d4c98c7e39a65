#include "msmx/preissman.hpp"

#include <algorithm>
#include <cmath>

#include "msmx/exact.hpp"

namespace msmx {

namespace {

// Transverse unknowns per node block (h, e, v, u pairs) plus per cell block
// (p, q pairs). A node and the cell to its right share a block of 12 slots.
constexpr int kNodeSlots = 8;
constexpr int kCellSlots = 4;
constexpr int kBlock = kNodeSlots + kCellSlots;
constexpr int kBand = 15;  // widest row-column offset a cell's equations produce

}  // namespace

PreissmanStepper::PreissmanStepper(const Grid1D& grid, MediumProfile medium, SourceProfile src, BoundarySpec bc,
                                   double dt_signed)
    : grid_(grid), medium_(std::move(medium)), src_(std::move(src)), bc_(bc) {
    medium_.validate(grid_.nx);
    dt_ = dt_signed == 0.0 ? grid_.dt : dt_signed;
    periodic_ = bc_.kind == BoundarySpec::Kind::periodic;
    pinned_ = periodic_ && grid_.nx % 2 == 0;
    nsys_ = periodic_ ? kBlock * grid_.nx : kBlock * grid_.nx + kNodeSlots;
    if (bc_.kind == BoundarySpec::Kind::dirichlet_exact && !medium_.spatially_constant())
        throw ValidationError("preissman: dirichlet_exact boundaries need a spatially constant medium");
    assemble();
}

double* PreissmanStepper::slot_ptr(PreissmanLevel& lvl, int s) const {
    const int blk = s / kBlock, off = s % kBlock;
    switch (off) {
        case 0: return &lvl.h[blk].y;
        case 1: return &lvl.h[blk].z;
        case 2: return &lvl.e[blk].y;
        case 3: return &lvl.e[blk].z;
        case 4: return &lvl.v[blk].y;
        case 5: return &lvl.v[blk].z;
        case 6: return &lvl.u[blk].y;
        case 7: return &lvl.u[blk].z;
        case 8: return &lvl.p[blk].y;
        case 9: return &lvl.p[blk].z;
        case 10: return &lvl.q[blk].y;
        default: return &lvl.q[blk].z;
    }
}

std::array<double, 12> PreissmanStepper::cell_rows(int i, const PreissmanLevel& a, const PreissmanLevel& b,
                                                   bool with_sources) const {
    const int ip = periodic_ ? (i + 1) % grid_.nx : i + 1;
    const double rdx = 1.0 / grid_.dx();
    const double mu = medium_.mu[i], eps = medium_.eps[i];

    const V2 du = (b.u[ip] - b.u[i]) + (a.u[ip] - a.u[i]);
    const V2 dv = (b.v[ip] - b.v[i]) + (a.v[ip] - a.v[i]);
    const V2 de = (b.e[ip] - b.e[i]) + (a.e[ip] - a.e[i]);
    const V2 dh = (b.h[ip] - b.h[i]) + (a.h[ip] - a.h[i]);
    const V2 hsum = a.h[i] + a.h[ip] + b.h[i] + b.h[ip];
    const V2 esum = a.e[i] + a.e[ip] + b.e[i] + b.e[ip];
    const V2 psum = transverse(a.p[i]) + transverse(b.p[i]);
    const V2 qsum = transverse(a.q[i]) + transverse(b.q[i]);
    const V2 pdiff = transverse(b.p[i]) - transverse(a.p[i]);
    const V2 qdiff = transverse(b.q[i]) - transverse(a.q[i]);

    V2 jt, kt;
    if (with_sources && !src_.is_zero()) {
        const BoxSources s = box_sources(src_, grid_.node(i), grid_.node(i + 1), a.t, b.t);
        jt = transverse(s.j);
        kt = transverse(s.k);
    }

    // The six transverse pairs of the box scheme, each scaled by 4 so that no
    // division by dt*dx appears:
    //   (1/2) U_x = P - mu H            (2/dt)(V' - V) averaged = box H
    //  -(1/2) V_x = Q - eps E           (2/dt)(U' - U) averaged = box E
    //  -P_t - (1/2) E_x = K            -Q_t + (1/2) H_x = J
    const V2 r1 = rdx * j2(du) - 2.0 * psum + mu * hsum;
    const V2 r2 = -(rdx)*j2(dv) - 2.0 * qsum + eps * esum;
    const V2 r3 = -(4.0 / dt_) * pdiff - rdx * j2(de) - 4.0 * kt;
    const V2 r4 = -(4.0 / dt_) * qdiff + rdx * j2(dh) - 4.0 * jt;
    const V2 r5 = (2.0 / dt_) * (b.v[i] + b.v[ip] - a.v[i] - a.v[ip]) - hsum;
    const V2 r6 = (2.0 / dt_) * (b.u[i] + b.u[ip] - a.u[i] - a.u[ip]) - esum;
    return {r1.y, r1.z, r2.y, r2.z, r3.y, r3.z, r4.y, r4.z, r5.y, r5.z, r6.y, r6.z};
}

void PreissmanStepper::assemble() {
    const int nx = grid_.nx;
    Eigen::MatrixXd dense;
    if (periodic_)
        dense = Eigen::MatrixXd::Zero(nsys_, nsys_);
    else
        band_.emplace(nsys_, kBand, kBand);

    PreissmanLevel za = zero_level(0.0), zb = zero_level(0.0);
    auto put = [&](int row, int col, double val) {
        if (val == 0.0) return;
        if (periodic_)
            dense(row, col) = val;
        else
            band_->at(row, col) = val;
    };

    for (int i = 0; i < nx; ++i) {
        const int ip = periodic_ ? (i + 1) % nx : i + 1;
        std::vector<int> cols;
        for (int off = 0; off < kNodeSlots; ++off) cols.push_back(kBlock * i + off);
        for (int off = 0; off < kNodeSlots; ++off) cols.push_back(kBlock * ip + off);
        for (int off = kNodeSlots; off < kBlock; ++off) cols.push_back(kBlock * i + off);
        for (int col : cols) {
            *slot_ptr(zb, col) = 1.0;
            const auto rows = cell_rows(i, za, zb, false);
            *slot_ptr(zb, col) = 0.0;
            for (int r = 0; r < 12; ++r) put(row_of(i, r), col, rows[r]);
        }
    }

    if (!periodic_) {
        // Boundary rows pin the transverse fields at both end nodes.
        for (int t = 0; t < 4; ++t) {
            band_->at(t, t) = 1.0;
            band_->at(4 + 12 * nx + t, kBlock * nx + t) = 1.0;
        }
        band_->factor();
    } else {
        if (pinned_) {
            // On an even periodic grid the box equations admit alternating
            // (checkerboard) modes in (h, e) with compensating potentials.
            // The replaced rows, two of eq5 and two of eq6 on cell 0, hold
            // automatically because their alternating sums telescope to zero;
            // pinning the alternating sums of h and e removes the null space
            // without touching the dynamics.
            for (int t = 0; t < 4; ++t) {
                dense.row(8 + t).setZero();
                for (int i = 0; i < nx; ++i) dense(8 + t, kBlock * i + t) = (i % 2 == 0) ? 1.0 : -1.0;
            }
        }
        lu_.compute(dense);
    }
}

PreissmanLevel PreissmanStepper::zero_level(double t0) const {
    PreissmanLevel lvl;
    lvl.t = t0;
    lvl.nx = grid_.nx;
    lvl.periodic = periodic_;
    lvl.h.assign(lvl.nodes(), {});
    lvl.e.assign(lvl.nodes(), {});
    lvl.v.assign(lvl.nodes(), {});
    lvl.u.assign(lvl.nodes(), {});
    lvl.p.assign(lvl.nx, {});
    lvl.q.assign(lvl.nx, {});
    lvl.h1.assign(lvl.nx, 0.0);
    lvl.e1.assign(lvl.nx, 0.0);
    lvl.v1.assign(lvl.nx, 0.0);
    lvl.u1.assign(lvl.nx, 0.0);
    return lvl;
}

PreissmanLevel PreissmanStepper::initial_exact(double t0, GaugeKind gauge) const {
    if (!medium_.spatially_constant())
        throw ValidationError("preissman: exact initial data needs a spatially constant medium");
    const double eps = medium_.eps[0], mu = medium_.mu[0];
    PreissmanLevel lvl = zero_level(t0);
    for (int i = 0; i < lvl.nodes(); ++i) {
        const double x = grid_.node(i);
        const FieldPoint fp = exact_plane_wave(x, t0, eps, mu);
        lvl.h[i] = transverse(fp.H);
        lvl.e[i] = transverse(fp.E);
        if (gauge == GaugeKind::analytic) {
            const PotentialPoint pp = exact_potentials(x, t0, eps, mu);
            lvl.v[i] = transverse(pp.V);
            lvl.u[i] = transverse(pp.U);
        }
    }
    for (int i = 0; i < grid_.nx; ++i) {
        const double xc = grid_.cell(i);
        if (gauge == GaugeKind::analytic) {
            const PotentialPoint pp = exact_potentials(xc, t0, eps, mu);
            lvl.p[i] = pp.P;
            lvl.q[i] = pp.Q;
        } else {
            const FieldPoint fp = exact_plane_wave(xc, t0, eps, mu);
            lvl.p[i] = mu * fp.H;
            lvl.q[i] = eps * fp.E;
        }
    }
    return lvl;
}

PreissmanLevel PreissmanStepper::initial_sampled(const std::vector<FieldPoint>& nodal, double t0) const {
    PreissmanLevel lvl = zero_level(t0);
    if (static_cast<int>(nodal.size()) != lvl.nodes())
        throw ValidationError("preissman: sampled initial data has the wrong node count");
    for (int i = 0; i < lvl.nodes(); ++i) {
        lvl.h[i] = transverse(nodal[i].H);
        lvl.e[i] = transverse(nodal[i].E);
    }
    for (int i = 0; i < grid_.nx; ++i) {
        const int ip = periodic_ ? (i + 1) % grid_.nx : i + 1;
        const Vec3 havg = 0.5 * (nodal[i].H + nodal[ip].H);
        const Vec3 eavg = 0.5 * (nodal[i].E + nodal[ip].E);
        lvl.p[i] = medium_.mu[i] * havg;
        lvl.q[i] = medium_.eps[i] * eavg;
        lvl.h1[i] = havg.x;
        lvl.e1[i] = eavg.x;
    }
    return lvl;
}

void PreissmanStepper::check_level(const PreissmanLevel& lvl) const {
    if (lvl.nx != grid_.nx || lvl.periodic != periodic_ || static_cast<int>(lvl.h.size()) != lvl.nodes() ||
        static_cast<int>(lvl.p.size()) != lvl.nx)
        throw ValidationError("preissman: level does not match the solver's grid");
}

PreissmanLevel PreissmanStepper::step(const PreissmanLevel& a) {
    check_level(a);
    PreissmanLevel b = zero_level(a.t + dt_);
    const int nx = grid_.nx;

    std::vector<double> rhs(nsys_, 0.0);
    for (int i = 0; i < nx; ++i) {
        const auto rows = cell_rows(i, a, b, true);
        for (int r = 0; r < 12; ++r) rhs[row_of(i, r)] = -rows[r];
    }

    if (!periodic_) {
        FieldPoint left = bc_.left, right = bc_.right;
        if (bc_.kind == BoundarySpec::Kind::dirichlet_exact) {
            left = exact_plane_wave(grid_.node(0), b.t, medium_.eps[0], medium_.mu[0]);
            right = exact_plane_wave(grid_.node(nx), b.t, medium_.eps[0], medium_.mu[0]);
        }
        rhs[0] = left.H.y;
        rhs[1] = left.H.z;
        rhs[2] = left.E.y;
        rhs[3] = left.E.z;
        rhs[4 + 12 * nx + 0] = right.H.y;
        rhs[4 + 12 * nx + 1] = right.H.z;
        rhs[4 + 12 * nx + 2] = right.E.y;
        rhs[4 + 12 * nx + 3] = right.E.z;
        band_->solve(rhs);
    } else {
        if (pinned_) {
            for (int t = 0; t < 4; ++t) {
                double sum = 0.0;
                for (int i = 0; i < nx; ++i) {
                    const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
                    const double val = t == 0 ? a.h[i].y : t == 1 ? a.h[i].z : t == 2 ? a.e[i].y : a.e[i].z;
                    sum += sgn * val;
                }
                rhs[8 + t] = sum;
            }
        }
        Eigen::Map<Eigen::VectorXd> r(rhs.data(), nsys_);
        r = lu_.solve(r).eval();
    }

    for (int s = 0; s < nsys_; ++s) *slot_ptr(b, s) = rhs[s];

    // Axial components never couple across cells: P1, Q1 integrate the axial
    // sources exactly, the constitutive rows then give H1, E1 and midpoint
    // quadrature gives V1, U1.
    for (int i = 0; i < nx; ++i) {
        Vec3 js, ks;
        if (!src_.is_zero()) {
            const BoxSources s = box_sources(src_, grid_.node(i), grid_.node(i + 1), a.t, b.t);
            js = s.j;
            ks = s.k;
        }
        b.p[i].x = a.p[i].x - dt_ * ks.x;
        b.q[i].x = a.q[i].x - dt_ * js.x;
        b.h1[i] = (a.p[i].x + b.p[i].x) / medium_.mu[i] - a.h1[i];
        b.e1[i] = (a.q[i].x + b.q[i].x) / medium_.eps[i] - a.e1[i];
        b.v1[i] = a.v1[i] + 0.5 * dt_ * (a.h1[i] + b.h1[i]);
        b.u1[i] = a.u1[i] + 0.5 * dt_ * (a.e1[i] + b.e1[i]);
    }
    return b;
}

std::vector<std::array<double, 12>> PreissmanStepper::box_residuals(const PreissmanLevel& a, const PreissmanLevel& b,
                                                                    bool with_sources) const {
    check_level(a);
    check_level(b);
    std::vector<std::array<double, 12>> out(grid_.nx);
    for (int i = 0; i < grid_.nx; ++i) out[i] = cell_rows(i, a, b, with_sources);
    return out;
}

std::vector<FieldPoint> PreissmanStepper::nodal_states(const PreissmanLevel& lvl) const {
    check_level(lvl);
    const int nx = lvl.nx;
    std::vector<FieldPoint> out(lvl.nodes());
    for (int i = 0; i < lvl.nodes(); ++i) {
        double hx, ex;
        if (periodic_) {
            const int cl = (i + nx - 1) % nx;
            hx = 0.5 * (lvl.h1[cl] + lvl.h1[i]);
            ex = 0.5 * (lvl.e1[cl] + lvl.e1[i]);
        } else if (i == 0) {
            hx = lvl.h1[0];
            ex = lvl.e1[0];
        } else if (i == nx) {
            hx = lvl.h1[nx - 1];
            ex = lvl.e1[nx - 1];
        } else {
            hx = 0.5 * (lvl.h1[i - 1] + lvl.h1[i]);
            ex = 0.5 * (lvl.e1[i - 1] + lvl.e1[i]);
        }
        out[i].H = {hx, lvl.h[i].y, lvl.h[i].z};
        out[i].E = {ex, lvl.e[i].y, lvl.e[i].z};
    }
    return out;
}

void apply_gauge_shift(PreissmanLevel& lvl, const Grid1D& grid, const std::function<V2(double)>& dV,
                       const std::function<V2(double)>& dU) {
    if (lvl.nx != grid.nx) throw ValidationError("gauge shift: level does not match the grid");
    const double rdx = 1.0 / grid.dx();
    for (int i = 0; i < lvl.nodes(); ++i) {
        lvl.v[i] += dV(grid.node(i));
        lvl.u[i] += dU(grid.node(i));
    }
    // The compensating momentum shift keeps the curl-constraint rows exact:
    // P += (1/2) (dU)_x rotated, Q -= (1/2) (dV)_x rotated, per cell.
    for (int i = 0; i < lvl.nx; ++i) {
        const V2 ddu = dU(grid.node(i + 1)) - dU(grid.node(i));
        const V2 ddv = dV(grid.node(i + 1)) - dV(grid.node(i));
        const V2 dp = 0.5 * rdx * j2(ddu);
        const V2 dq = -0.5 * rdx * j2(ddv);
        lvl.p[i].y += dp.y;
        lvl.p[i].z += dp.z;
        lvl.q[i].y += dq.y;
        lvl.q[i].z += dq.z;
    }
}

FieldLevel preissman_step(const Grid1D& grid, const MediumProfile& medium, const SourceProfile& src,
                          const BoundarySpec& bc, const FieldLevel& level) {
    PreissmanStepper stepper(grid, medium, src, bc);
    const PreissmanLevel a = stepper.initial_sampled(level.f, level.t);
    const PreissmanLevel b = stepper.step(a);
    return {b.t, stepper.nodal_states(b)};
}

}  // namespace msmx
