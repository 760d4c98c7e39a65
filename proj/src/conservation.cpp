#include "msmx/conservation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "msmx/errors.hpp"
#include "msmx/rng.hpp"
#include "msmx/structure.hpp"

namespace msmx {

namespace {

// Tangent data for non-periodic grids is windowed to vanish at both ends,
// matching the homogeneous Dirichlet rows a difference of solutions obeys.
double end_window(const Grid1D& g, bool periodic, double x) {
    if (periodic) return 1.0;
    const double s = std::sin(std::numbers::pi * (x - g.x0) / g.length);
    return s * s;
}

double max_level(const PreissmanLevel& l) {
    double m = 0.0;
    for (const auto* f : {&l.h, &l.e, &l.v, &l.u})
        for (const V2& w : *f) m = std::max({m, std::abs(w.y), std::abs(w.z)});
    for (const auto* f : {&l.p, &l.q})
        for (const Vec3& w : *f) m = std::max({m, std::abs(w.x), std::abs(w.y), std::abs(w.z)});
    for (const auto* f : {&l.h1, &l.e1, &l.v1, &l.u1})
        for (double w : *f) m = std::max(m, std::abs(w));
    return m;
}

double max_level(const TwoFieldLevel& l) {
    double m = 0.0;
    for (const auto* f : {&l.h, &l.e})
        for (const V2& w : *f) m = std::max({m, std::abs(w.y), std::abs(w.z)});
    for (const auto* f : {&l.h1, &l.e1})
        for (double w : *f) m = std::max(m, std::abs(w));
    return m;
}

// Steps a tangent forward and certifies each transition against the
// linearized box equations. row_rate turns a field amplitude into the
// natural magnitude of one scaled equation row.
template <typename Stepper, typename Level>
std::vector<Level> evolve_certified(Stepper& stepper, const Level& init, int nt, double row_rate) {
    std::vector<Level> levels;
    levels.reserve(static_cast<std::size_t>(nt) + 1);
    levels.push_back(init);
    for (int s = 0; s < nt; ++s) levels.push_back(stepper.step(levels.back()));
    for (int s = 0; s < nt; ++s) {
        const auto rows = stepper.box_residuals(levels[s], levels[s + 1], /*with_sources=*/false);
        double worst = 0.0;
        for (const auto& cell : rows)
            for (double r : cell) worst = std::max(worst, std::abs(r));
        const double amp = std::max(max_level(levels[s]), max_level(levels[s + 1]));
        if (worst > 1e-10 * row_rate * amp)
            throw NumericalError("tangent certificate failed at step " + std::to_string(s));
    }
    return levels;
}

double row_rate_preissman(const Grid1D& g, const MediumProfile& med, double dt) {
    double med_max = 1.0;
    for (std::size_t i = 0; i < med.eps.size(); ++i)
        med_max = std::max({med_max, med.eps[i], med.mu[i]});
    return (4.0 / std::abs(dt) + 2.0 / g.dx()) * med_max;
}

double row_rate_2field(const Grid1D& g, const MediumProfile& med, double dt) {
    double med_min = 1.0;
    for (std::size_t i = 0; i < med.eps.size(); ++i)
        med_min = std::min({med_min, med.eps[i], med.mu[i]});
    return 4.0 / std::abs(dt) + 4.0 / (g.dx() * med_min);
}

// Box-interpolated tangent values, packed as 18-vectors for the structure
// forms. kappa lives on nodes at half time levels and only reads the
// transverse (H,E,V,U) slots K1 couples; omega lives on cells at whole
// levels and only reads the (V,U,P,Q) slots M couples.
State18 node_tangent(const PreissmanLevel& a, const PreissmanLevel& b, int i) {
    ExtendedState z;
    const auto put = [](Vec3& dst, const V2& pa, const V2& pb) {
        dst.y = 0.5 * (pa.y + pb.y);
        dst.z = 0.5 * (pa.z + pb.z);
    };
    put(z.H, a.h[i], b.h[i]);
    put(z.E, a.e[i], b.e[i]);
    put(z.V, a.v[i], b.v[i]);
    put(z.U, a.u[i], b.u[i]);
    return to_flat(z);
}

State18 cell_tangent(const PreissmanLevel& l, int i) {
    const int ip = l.periodic ? (i + 1) % l.nx : i + 1;
    ExtendedState z;
    z.V = {l.v1[i], 0.5 * (l.v[i].y + l.v[ip].y), 0.5 * (l.v[i].z + l.v[ip].z)};
    z.U = {l.u1[i], 0.5 * (l.u[i].y + l.u[ip].y), 0.5 * (l.u[i].z + l.u[ip].z)};
    z.P = l.p[i];
    z.Q = l.q[i];
    return to_flat(z);
}

template <typename Level>
void check_pair_shape(const std::vector<Level>& xi, const std::vector<Level>& eta, const Grid1D& grid) {
    if (xi.size() != eta.size() || xi.size() < 2)
        throw ValidationError("conservation: need two tangent trajectories with at least two levels");
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const bool shape_ok = xi[j].nx == grid.nx && eta[j].nx == grid.nx &&
                              xi[j].periodic == xi[0].periodic && eta[j].periodic == xi[0].periodic &&
                              static_cast<int>(xi[j].h.size()) == xi[j].nodes() &&
                              static_cast<int>(eta[j].h.size()) == eta[j].nodes();
        if (!shape_ok) throw ValidationError("conservation: tangent pair does not match the grid");
        if (std::abs(xi[j].t - eta[j].t) > 1e-12 * std::max(1.0, std::abs(xi[j].t)))
            throw ValidationError("conservation: tangent trajectories disagree on time levels");
        if (j > 0 && !(std::abs(xi[j].t - xi[j - 1].t) > 0.0))
            throw ValidationError("conservation: tangent levels must be separated in time");
    }
}

struct FluxTracker {
    double max_abs = 0.0;
    double scale = 0.0;

    void flux(double value, double denom) { scale = std::max(scale, std::abs(value) / denom); }
    void residual(double r) { max_abs = std::max(max_abs, std::abs(r)); }
};

}  // namespace

PreissmanLevel random_tangent_level(const Grid1D& grid, bool periodic, double t0, std::uint64_t seed) {
    PreissmanLevel l;
    l.t = t0;
    l.nx = grid.nx;
    l.periodic = periodic;
    const int nodes = l.nodes();
    l.h.resize(nodes);
    l.e.resize(nodes);
    l.v.resize(nodes);
    l.u.resize(nodes);
    l.p.resize(grid.nx);
    l.q.resize(grid.nx);
    l.h1.resize(grid.nx);
    l.e1.resize(grid.nx);
    l.v1.resize(grid.nx);
    l.u1.resize(grid.nx);
    if (seed == 0) return l;

    Rng rng(seed);
    const auto field = [&] { return FourierField1D(rng, grid.x0, grid.length, 3, 1.0); };
    // Eighteen independent smooth profiles, one per staggered slot.
    FourierField1D fhy = field(), fhz = field(), fey = field(), fez = field();
    FourierField1D fvy = field(), fvz = field(), fuy = field(), fuz = field();
    FourierField1D fpx = field(), fpy = field(), fpz = field();
    FourierField1D fqx = field(), fqy = field(), fqz = field();
    FourierField1D fh1 = field(), fe1 = field(), fv1 = field(), fu1 = field();

    for (int i = 0; i < nodes; ++i) {
        const double x = grid.node(i);
        const double w = end_window(grid, periodic, x);
        l.h[i] = {w * fhy.value(x), w * fhz.value(x)};
        l.e[i] = {w * fey.value(x), w * fez.value(x)};
        l.v[i] = {w * fvy.value(x), w * fvz.value(x)};
        l.u[i] = {w * fuy.value(x), w * fuz.value(x)};
    }
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.cell(i);
        const double w = end_window(grid, periodic, x);
        l.p[i] = {w * fpx.value(x), w * fpy.value(x), w * fpz.value(x)};
        l.q[i] = {w * fqx.value(x), w * fqy.value(x), w * fqz.value(x)};
        l.h1[i] = w * fh1.value(x);
        l.e1[i] = w * fe1.value(x);
        l.v1[i] = w * fv1.value(x);
        l.u1[i] = w * fu1.value(x);
    }
    return l;
}

TwoFieldLevel random_tangent_level_2field(const Grid1D& grid, bool periodic, double t0,
                                          std::uint64_t seed) {
    TwoFieldLevel l;
    l.t = t0;
    l.nx = grid.nx;
    l.periodic = periodic;
    l.h.resize(l.nodes());
    l.e.resize(l.nodes());
    l.h1.resize(grid.nx);
    l.e1.resize(grid.nx);
    if (seed == 0) return l;

    Rng rng(seed);
    const auto field = [&] { return FourierField1D(rng, grid.x0, grid.length, 3, 1.0); };
    FourierField1D fhy = field(), fhz = field(), fey = field(), fez = field();
    FourierField1D fh1 = field(), fe1 = field();

    for (int i = 0; i < l.nodes(); ++i) {
        const double x = grid.node(i);
        const double w = end_window(grid, periodic, x);
        l.h[i] = {w * fhy.value(x), w * fhz.value(x)};
        l.e[i] = {w * fey.value(x), w * fez.value(x)};
    }
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.cell(i);
        const double w = end_window(grid, periodic, x);
        l.h1[i] = w * fh1.value(x);
        l.e1[i] = w * fe1.value(x);
    }
    return l;
}

TangentPair make_tangent_pair(const Grid1D& grid, const MediumProfile& medium, const BoundarySpec& bc,
                              int nt, std::uint64_t seed_xi, std::uint64_t seed_eta) {
    if (nt < 1) throw ValidationError("tangent pair: need at least one step");
    const BoundarySpec tbc = bc.kind == BoundarySpec::Kind::periodic
                                 ? bc
                                 : BoundarySpec::dirichlet_fixed({}, {});
    PreissmanStepper stepper(grid, medium, SourceProfile::zero(), tbc);
    const double rate = row_rate_preissman(grid, medium, stepper.dt());
    TangentPair pair;
    pair.xi = evolve_certified(stepper, random_tangent_level(grid, stepper.periodic(), 0.0, seed_xi), nt, rate);
    pair.eta =
        evolve_certified(stepper, random_tangent_level(grid, stepper.periodic(), 0.0, seed_eta), nt, rate);
    return pair;
}

TangentPair2F make_tangent_pair_2field(const Grid1D& grid, const MediumProfile& medium,
                                       const BoundarySpec& bc, int nt, std::uint64_t seed_xi,
                                       std::uint64_t seed_eta) {
    if (nt < 1) throw ValidationError("tangent pair: need at least one step");
    const BoundarySpec tbc = bc.kind == BoundarySpec::Kind::periodic
                                 ? bc
                                 : BoundarySpec::dirichlet_fixed({}, {});
    MidpointTwoField stepper(grid, medium, SourceProfile::zero(), tbc);
    const bool periodic = tbc.kind == BoundarySpec::Kind::periodic;
    const double rate = row_rate_2field(grid, medium, stepper.dt());
    TangentPair2F pair;
    pair.xi = evolve_certified(stepper, random_tangent_level_2field(grid, periodic, 0.0, seed_xi), nt, rate);
    pair.eta =
        evolve_certified(stepper, random_tangent_level_2field(grid, periodic, 0.0, seed_eta), nt, rate);
    return pair;
}

ResidualReport msc_residual_preissman(const TangentPair& pair, const Grid1D& grid,
                                      const MediumProfile& medium) {
    medium.validate(grid.nx);
    check_pair_shape(pair.xi, pair.eta, grid);
    const MsStructure S = assemble_ms_structure();
    const int nx = grid.nx;
    const int nlev = static_cast<int>(pair.xi.size());
    const bool periodic = pair.xi[0].periodic;
    const int nodes = pair.xi[0].nodes();
    const double dx = grid.dx();

    std::vector<double> omg(static_cast<std::size_t>(nlev) * nx);
    for (int j = 0; j < nlev; ++j)
        for (int i = 0; i < nx; ++i)
            omg[static_cast<std::size_t>(j) * nx + i] =
                two_forms(cell_tangent(pair.xi[j], i), cell_tangent(pair.eta[j], i), S).omega;

    ResidualReport rep;
    rep.nx = nx;
    rep.nt = nlev - 1;
    rep.residuals.resize(static_cast<std::size_t>(rep.nt) * nx);
    FluxTracker track;
    std::vector<double> kap(nodes);
    for (int j = 0; j < rep.nt; ++j) {
        const double dt = pair.xi[j + 1].t - pair.xi[j].t;
        for (int i = 0; i < nodes; ++i)
            kap[i] = two_forms(node_tangent(pair.xi[j], pair.xi[j + 1], i),
                               node_tangent(pair.eta[j], pair.eta[j + 1], i), S)
                         .kappa;
        for (int i = 0; i < nx; ++i) {
            const int ip = periodic ? (i + 1) % nx : i + 1;
            const double wa = omg[static_cast<std::size_t>(j) * nx + i];
            const double wb = omg[static_cast<std::size_t>(j + 1) * nx + i];
            const double r = (kap[ip] - kap[i]) / dx + (wb - wa) / dt;
            track.flux(kap[i], dx);
            track.flux(kap[ip], dx);
            track.flux(wa, std::abs(dt));
            track.flux(wb, std::abs(dt));
            track.residual(r);
            rep.residuals[static_cast<std::size_t>(j) * nx + i] = r;
        }
    }
    rep.max_abs = track.max_abs;
    rep.scale = track.scale;
    return rep;
}

ResidualReport msc_residual_2field(const TangentPair2F& pair, const Grid1D& grid,
                                   const MediumProfile& medium) {
    medium.validate(grid.nx);
    if (!medium.spatially_constant())
        throw ValidationError("two-field conservation: the medium must be spatially constant");
    check_pair_shape(pair.xi, pair.eta, grid);
    const double eps = medium.eps[0];
    const double mu = medium.mu[0];
    const int nx = grid.nx;
    const int nlev = static_cast<int>(pair.xi.size());
    const bool periodic = pair.xi[0].periodic;
    const int nodes = pair.xi[0].nodes();
    const double dx = grid.dx();

    // omega = <dE, dH> antisymmetrized, on cell-interpolated values (axial
    // components are cell-native, transverse ones average the two nodes).
    const auto omega_cell = [&](const TwoFieldLevel& x, const TwoFieldLevel& y, int i) {
        const int ip = periodic ? (i + 1) % nx : i + 1;
        const auto lift = [&](const TwoFieldLevel& l) {
            const Vec3 H{l.h1[i], 0.5 * (l.h[i].y + l.h[ip].y), 0.5 * (l.h[i].z + l.h[ip].z)};
            const Vec3 E{l.e1[i], 0.5 * (l.e[i].y + l.e[ip].y), 0.5 * (l.e[i].z + l.e[ip].z)};
            return FieldPoint{H, E};
        };
        const FieldPoint a = lift(x), b = lift(y);
        return dot(a.E, b.H) - dot(a.H, b.E);
    };
    // kappa on time-averaged nodal values; the medium weights come from the
    // flux matrix of the reduced system, so H pairs with 1/eps.
    const auto kappa_node = [&](const TwoFieldLevel& xa, const TwoFieldLevel& xb, const TwoFieldLevel& ya,
                                const TwoFieldLevel& yb, int i) {
        const V2 xh = 0.5 * (xa.h[i] + xb.h[i]), xe = 0.5 * (xa.e[i] + xb.e[i]);
        const V2 yh = 0.5 * (ya.h[i] + yb.h[i]), ye = 0.5 * (ya.e[i] + yb.e[i]);
        return -cross2(xh, yh) / eps - cross2(xe, ye) / mu;
    };

    std::vector<double> omg(static_cast<std::size_t>(nlev) * nx);
    for (int j = 0; j < nlev; ++j)
        for (int i = 0; i < nx; ++i)
            omg[static_cast<std::size_t>(j) * nx + i] = omega_cell(pair.xi[j], pair.eta[j], i);

    ResidualReport rep;
    rep.nx = nx;
    rep.nt = nlev - 1;
    rep.residuals.resize(static_cast<std::size_t>(rep.nt) * nx);
    FluxTracker track;
    std::vector<double> kap(nodes);
    for (int j = 0; j < rep.nt; ++j) {
        const double dt = pair.xi[j + 1].t - pair.xi[j].t;
        for (int i = 0; i < nodes; ++i)
            kap[i] = kappa_node(pair.xi[j], pair.xi[j + 1], pair.eta[j], pair.eta[j + 1], i);
        for (int i = 0; i < nx; ++i) {
            const int ip = periodic ? (i + 1) % nx : i + 1;
            const double wa = omg[static_cast<std::size_t>(j) * nx + i];
            const double wb = omg[static_cast<std::size_t>(j + 1) * nx + i];
            const double r = (kap[ip] - kap[i]) / dx + (wb - wa) / dt;
            track.flux(kap[i], dx);
            track.flux(kap[ip], dx);
            track.flux(wa, std::abs(dt));
            track.flux(wb, std::abs(dt));
            track.residual(r);
            rep.residuals[static_cast<std::size_t>(j) * nx + i] = r;
        }
    }
    rep.max_abs = track.max_abs;
    rep.scale = track.scale;
    return rep;
}

std::vector<double> energy_diagnostic(const std::vector<FieldLevel>& run, const Grid1D& grid,
                                      const MediumProfile& medium) {
    medium.validate(grid.nx);
    const double dx = grid.dx();
    std::vector<double> out;
    out.reserve(run.size());
    for (const FieldLevel& lvl : run) {
        const int n = static_cast<int>(lvl.f.size());
        bool periodic = false;
        if (n == grid.nx)
            periodic = true;
        else if (n != grid.nx + 1)
            throw ValidationError("energy diagnostic: level size matches neither a periodic nor a closed grid");
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = (!periodic && (i == 0 || i == grid.nx)) ? 0.5 : 1.0;
            const double density = 0.5 * (medium.mu_node(i, periodic) * dot(lvl.f[i].H, lvl.f[i].H) +
                                          medium.eps_node(i, periodic) * dot(lvl.f[i].E, lvl.f[i].E));
            acc += w * density;
        }
        out.push_back(dx * acc);
    }
    return out;
}

}  // namespace msmx
