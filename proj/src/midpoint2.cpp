#include "msmx/midpoint2.hpp"

#include <cmath>

#include "msmx/exact.hpp"

namespace msmx {

namespace {
constexpr int kNodeSlots = 4;  // h.y, h.z, e.y, e.z
constexpr int kBand = 5;
}  // namespace

MidpointTwoField::MidpointTwoField(const Grid1D& grid, MediumProfile medium, SourceProfile src, BoundarySpec bc,
                                   double dt_signed)
    : grid_(grid), medium_(std::move(medium)), src_(std::move(src)), bc_(bc) {
    medium_.validate(grid_.nx);
    if (!medium_.spatially_constant())
        throw ValidationError("two-field scheme: the medium must be spatially constant");
    eps_ = medium_.eps[0];
    mu_ = medium_.mu[0];
    dt_ = dt_signed == 0.0 ? grid_.dt : dt_signed;
    periodic_ = bc_.kind == BoundarySpec::Kind::periodic;
    nsys_ = periodic_ ? kNodeSlots * grid_.nx : kNodeSlots * (grid_.nx + 1);
    assemble();
}

double* MidpointTwoField::slot_ptr(TwoFieldLevel& lvl, int s) const {
    const int blk = s / kNodeSlots, off = s % kNodeSlots;
    switch (off) {
        case 0: return &lvl.h[blk].y;
        case 1: return &lvl.h[blk].z;
        case 2: return &lvl.e[blk].y;
        default: return &lvl.e[blk].z;
    }
}

std::array<double, 4> MidpointTwoField::cell_rows(int i, const TwoFieldLevel& a, const TwoFieldLevel& b,
                                                  bool with_sources) const {
    const int ip = periodic_ ? (i + 1) % grid_.nx : i + 1;
    const double rdx = 1.0 / grid_.dx();

    const V2 dh = (b.h[ip] - b.h[i]) + (a.h[ip] - a.h[i]);
    const V2 de = (b.e[ip] - b.e[i]) + (a.e[ip] - a.e[i]);
    const V2 ebar_diff = 0.5 * (b.e[i] + b.e[ip] - a.e[i] - a.e[ip]);
    const V2 hbar_diff = 0.5 * (b.h[i] + b.h[ip] - a.h[i] - a.h[ip]);

    V2 jt, kt;
    if (with_sources && !src_.is_zero()) {
        const BoxSources s = box_sources(src_, grid_.node(i), grid_.node(i + 1), a.t, b.t);
        jt = transverse(s.j);
        kt = transverse(s.k);
    }

    // Both first-order equations scaled by 2:
    //   E_t - (1/eps) R H_x = -J/eps      -H_t - (1/mu) R E_x = K/mu
    const V2 r1 = (2.0 / dt_) * ebar_diff - rdx / eps_ * j2(dh) + (2.0 / eps_) * jt;
    const V2 r2 = -(2.0 / dt_) * hbar_diff - rdx / mu_ * j2(de) - (2.0 / mu_) * kt;
    return {r1.y, r1.z, r2.y, r2.z};
}

void MidpointTwoField::assemble() {
    const int nx = grid_.nx;
    Eigen::MatrixXd dense;
    if (periodic_)
        dense = Eigen::MatrixXd::Zero(nsys_, nsys_);
    else
        band_.emplace(nsys_, kBand, kBand);

    TwoFieldLevel za = zero_level(0.0), zb = zero_level(0.0);
    auto put = [&](int row, int col, double val) {
        if (val == 0.0) return;
        if (periodic_)
            dense(row, col) = val;
        else
            band_->at(row, col) = val;
    };

    for (int i = 0; i < nx; ++i) {
        const int ip = periodic_ ? (i + 1) % nx : i + 1;
        for (int node : {i, ip}) {
            for (int off = 0; off < kNodeSlots; ++off) {
                const int col = kNodeSlots * node + off;
                *slot_ptr(zb, col) = 1.0;
                const auto rows = cell_rows(i, za, zb, false);
                *slot_ptr(zb, col) = 0.0;
                for (int r = 0; r < 4; ++r) put(row_of(i, r), col, rows[r]);
            }
        }
    }

    if (!periodic_) {
        // Boundary rows pin the transverse E at the end nodes.
        band_->at(0, 2) = 1.0;
        band_->at(1, 3) = 1.0;
        band_->at(4 * nx + 2, 4 * nx + 2) = 1.0;
        band_->at(4 * nx + 3, 4 * nx + 3) = 1.0;
        band_->factor();
    } else {
        lu_.compute(dense);
    }
}

TwoFieldLevel MidpointTwoField::zero_level(double t0) const {
    TwoFieldLevel lvl;
    lvl.t = t0;
    lvl.nx = grid_.nx;
    lvl.periodic = periodic_;
    lvl.h.assign(lvl.nodes(), {});
    lvl.e.assign(lvl.nodes(), {});
    lvl.h1.assign(lvl.nx, 0.0);
    lvl.e1.assign(lvl.nx, 0.0);
    return lvl;
}

TwoFieldLevel MidpointTwoField::initial_exact(double t0) const {
    TwoFieldLevel lvl = zero_level(t0);
    for (int i = 0; i < lvl.nodes(); ++i) {
        const FieldPoint fp = exact_plane_wave(grid_.node(i), t0, eps_, mu_);
        lvl.h[i] = transverse(fp.H);
        lvl.e[i] = transverse(fp.E);
    }
    return lvl;
}

TwoFieldLevel MidpointTwoField::initial_sampled(const std::vector<FieldPoint>& nodal, double t0) const {
    TwoFieldLevel lvl = zero_level(t0);
    if (static_cast<int>(nodal.size()) != lvl.nodes())
        throw ValidationError("two-field scheme: sampled initial data has the wrong node count");
    for (int i = 0; i < lvl.nodes(); ++i) {
        lvl.h[i] = transverse(nodal[i].H);
        lvl.e[i] = transverse(nodal[i].E);
    }
    for (int i = 0; i < grid_.nx; ++i) {
        const int ip = periodic_ ? (i + 1) % grid_.nx : i + 1;
        lvl.h1[i] = 0.5 * (nodal[i].H.x + nodal[ip].H.x);
        lvl.e1[i] = 0.5 * (nodal[i].E.x + nodal[ip].E.x);
    }
    return lvl;
}

void MidpointTwoField::check_level(const TwoFieldLevel& lvl) const {
    if (lvl.nx != grid_.nx || lvl.periodic != periodic_ || static_cast<int>(lvl.h.size()) != lvl.nodes())
        throw ValidationError("two-field scheme: level does not match the solver's grid");
}

TwoFieldLevel MidpointTwoField::step(const TwoFieldLevel& a) {
    check_level(a);
    TwoFieldLevel b = zero_level(a.t + dt_);
    const int nx = grid_.nx;

    std::vector<double> rhs(nsys_, 0.0);
    for (int i = 0; i < nx; ++i) {
        const auto rows = cell_rows(i, a, b, true);
        for (int r = 0; r < 4; ++r) rhs[row_of(i, r)] = -rows[r];
    }

    if (!periodic_) {
        FieldPoint left = bc_.left, right = bc_.right;
        if (bc_.kind == BoundarySpec::Kind::dirichlet_exact) {
            left = exact_plane_wave(grid_.node(0), b.t, eps_, mu_);
            right = exact_plane_wave(grid_.node(nx), b.t, eps_, mu_);
        }
        rhs[0] = left.E.y;
        rhs[1] = left.E.z;
        rhs[4 * nx + 2] = right.E.y;
        rhs[4 * nx + 3] = right.E.z;
        band_->solve(rhs);
    } else {
        Eigen::Map<Eigen::VectorXd> r(rhs.data(), nsys_);
        r = lu_.solve(r).eval();
    }

    for (int s = 0; s < nsys_; ++s) *slot_ptr(b, s) = rhs[s];

    for (int i = 0; i < nx; ++i) {
        Vec3 js, ks;
        if (!src_.is_zero()) {
            const BoxSources s = box_sources(src_, grid_.node(i), grid_.node(i + 1), a.t, b.t);
            js = s.j;
            ks = s.k;
        }
        b.e1[i] = a.e1[i] - dt_ * js.x / eps_;
        b.h1[i] = a.h1[i] - dt_ * ks.x / mu_;
    }
    return b;
}

std::vector<std::array<double, 4>> MidpointTwoField::box_residuals(const TwoFieldLevel& a, const TwoFieldLevel& b,
                                                                   bool with_sources) const {
    check_level(a);
    check_level(b);
    std::vector<std::array<double, 4>> out(grid_.nx);
    for (int i = 0; i < grid_.nx; ++i) out[i] = cell_rows(i, a, b, with_sources);
    return out;
}

std::vector<FieldPoint> MidpointTwoField::nodal_states(const TwoFieldLevel& lvl) const {
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

FieldLevel midpoint_step_2field(const Grid1D& grid, const MediumProfile& medium, const SourceProfile& src,
                                const BoundarySpec& bc, const FieldLevel& level) {
    MidpointTwoField stepper(grid, medium, src, bc);
    const TwoFieldLevel a = stepper.initial_sampled(level.f, level.t);
    const TwoFieldLevel b = stepper.step(a);
    return {b.t, stepper.nodal_states(b)};
}

}  // namespace msmx
