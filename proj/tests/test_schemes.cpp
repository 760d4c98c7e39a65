#include <doctest.h>

#include <cmath>
#include <vector>

#include "msmx/exact.hpp"
#include "msmx/midpoint2.hpp"
#include "msmx/nine_point.hpp"
#include "msmx/preissman.hpp"
#include "msmx/rng.hpp"

using namespace msmx;

namespace {

std::vector<FieldPoint> random_nodal(Rng& rng, const Grid1D& g, int nodes, double window = 0.0) {
    std::vector<FourierField1D> f;
    f.reserve(6);
    for (int c = 0; c < 6; ++c) f.emplace_back(rng, g.x0, g.length, 3, 1.0);
    std::vector<FieldPoint> out(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double x = g.node(i);
        double w = 1.0;
        if (window > 0.0) {
            const double s = std::sin(M_PI * (x - g.x0) / g.length);
            w = s * s;
        }
        out[i].H = Vec3{f[0].value(x), f[1].value(x), f[2].value(x)} * w;
        out[i].E = Vec3{f[3].value(x), f[4].value(x), f[5].value(x)} * w;
    }
    return out;
}

double max_abs_level(const PreissmanLevel& l) {
    double m = 0.0;
    auto up2 = [&](const V2& v) { m = std::max({m, std::abs(v.y), std::abs(v.z)}); };
    auto up3 = [&](const Vec3& v) { m = std::max({m, std::abs(v.x), std::abs(v.y), std::abs(v.z)}); };
    for (const auto& v : l.h) up2(v);
    for (const auto& v : l.e) up2(v);
    for (const auto& v : l.v) up2(v);
    for (const auto& v : l.u) up2(v);
    for (const auto& v : l.p) up3(v);
    for (const auto& v : l.q) up3(v);
    for (double d : l.h1) m = std::max(m, std::abs(d));
    for (double d : l.e1) m = std::max(m, std::abs(d));
    for (double d : l.v1) m = std::max(m, std::abs(d));
    for (double d : l.u1) m = std::max(m, std::abs(d));
    return m;
}

double max_residual(const std::vector<std::array<double, 12>>& res) {
    double m = 0.0;
    for (const auto& cell : res)
        for (double r : cell) m = std::max(m, std::abs(r));
    return m;
}

double level_diff(const PreissmanLevel& a, const PreissmanLevel& b) {
    double m = 0.0;
    auto up = [&](double x, double y) { m = std::max(m, std::abs(x - y)); };
    for (std::size_t i = 0; i < a.h.size(); ++i) {
        up(a.h[i].y, b.h[i].y);
        up(a.h[i].z, b.h[i].z);
        up(a.e[i].y, b.e[i].y);
        up(a.e[i].z, b.e[i].z);
        up(a.v[i].y, b.v[i].y);
        up(a.v[i].z, b.v[i].z);
        up(a.u[i].y, b.u[i].y);
        up(a.u[i].z, b.u[i].z);
    }
    for (std::size_t i = 0; i < a.p.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            up(a.p[i][c], b.p[i][c]);
            up(a.q[i][c], b.q[i][c]);
        }
        up(a.h1[i], b.h1[i]);
        up(a.e1[i], b.e1[i]);
        up(a.v1[i], b.v1[i]);
        up(a.u1[i], b.u1[i]);
    }
    return m;
}

MediumProfile wavy_medium(const Grid1D& g) {
    return MediumProfile::from_functions(
        g, [](double x) { return 2.0 + 0.5 * std::sin(x); }, [](double x) { return 1.0 + 0.3 * std::cos(x); });
}

}  // namespace

TEST_CASE("box scheme keeps a uniform state stationary") {
    const Vec3 H0{0.4, -1.1, 0.7}, E0{-0.2, 0.9, 1.3};

    auto run = [&](const Grid1D& g, const BoundarySpec& bc) {
        PreissmanStepper stepper(g, wavy_medium(g), SourceProfile::zero(), bc);
        std::vector<FieldPoint> nodal(stepper.zero_level(0.0).nodes(), FieldPoint{H0, E0});
        PreissmanLevel lvl = stepper.initial_sampled(nodal, 0.0);
        const PreissmanLevel start = lvl;
        const int steps = 3;
        for (int s = 0; s < steps; ++s) lvl = stepper.step(lvl);

        const double tol = 1e-12 * std::max(1.0, max_abs_level(start));
        for (int i = 0; i < lvl.nodes(); ++i) {
            CHECK(std::abs(lvl.h[i].y - H0.y) <= tol);
            CHECK(std::abs(lvl.h[i].z - H0.z) <= tol);
            CHECK(std::abs(lvl.e[i].y - E0.y) <= tol);
            CHECK(std::abs(lvl.e[i].z - E0.z) <= tol);
            // potentials grow linearly: V accumulates t*H, U accumulates t*E
            const double t = lvl.t;
            CHECK(std::abs(lvl.v[i].y - t * H0.y) <= tol);
            CHECK(std::abs(lvl.u[i].z - t * E0.z) <= tol);
        }
        for (int i = 0; i < lvl.nx; ++i) {
            CHECK(std::abs(lvl.h1[i] - H0.x) <= tol);
            CHECK(std::abs(lvl.e1[i] - E0.x) <= tol);
        }
    };

    SUBCASE("periodic odd") { run(Grid1D(0.0, 2.0 * M_PI, 9, 0.05), BoundarySpec::periodic()); }
    SUBCASE("periodic even") { run(Grid1D(0.0, 2.0 * M_PI, 8, 0.05), BoundarySpec::periodic()); }
    SUBCASE("fixed boundaries") {
        run(Grid1D(0.0, 2.0 * M_PI, 10, 0.05), BoundarySpec::dirichlet_fixed({H0, E0}, {H0, E0}));
    }
}

TEST_CASE("box scheme steps solve the twelve cell equations to rounding") {
    auto run = [&](const Grid1D& g, const BoundarySpec& bc, std::uint64_t seed) {
        Rng rng(seed);
        PreissmanStepper stepper(g, wavy_medium(g), SourceProfile::zero(), bc);
        const bool windowed = bc.kind != BoundarySpec::Kind::periodic;
        PreissmanLevel a =
            stepper.initial_sampled(random_nodal(rng, g, stepper.zero_level(0.0).nodes(), windowed ? 1.0 : 0.0), 0.0);
        for (int s = 0; s < 4; ++s) {
            const PreissmanLevel b = stepper.step(a);
            const double scale =
                (4.0 / g.dt + 2.0 / g.dx()) * std::max(1.0, std::max(max_abs_level(a), max_abs_level(b)));
            CHECK(max_residual(stepper.box_residuals(a, b)) <= 1e-12 * scale);
            a = b;
        }
    };

    SUBCASE("periodic odd") { run(Grid1D(0.0, 2.0 * M_PI, 9, 0.04), BoundarySpec::periodic(), 11u); }
    SUBCASE("periodic even, pinned") { run(Grid1D(0.0, 2.0 * M_PI, 8, 0.04), BoundarySpec::periodic(), 12u); }
    SUBCASE("fixed zero boundaries") {
        run(Grid1D(0.0, 2.0 * M_PI, 10, 0.04), BoundarySpec::dirichlet_fixed({}, {}), 13u);
    }
}

TEST_CASE("exact plane-wave trajectories leave second-order cell residuals") {
    // Insert the closed-form solution (analytic gauge) at two consecutive
    // times; the scaled residuals must shrink by ~4 when dx and dt halve.
    auto residual_at = [&](int nx, double dt) {
        Grid1D g(0.0, 2.0 * M_PI, nx, dt);
        PreissmanStepper stepper(g, MediumProfile::constant(g, 2.0, 0.5), SourceProfile::zero(),
                                 BoundarySpec::periodic());
        const PreissmanLevel a = stepper.initial_exact(0.3, GaugeKind::analytic);
        const PreissmanLevel b = stepper.initial_exact(0.3 + dt, GaugeKind::analytic);
        return max_residual(stepper.box_residuals(a, b));
    };
    const double coarse = residual_at(17, 0.02);
    const double fine = residual_at(34, 0.01);
    CHECK(coarse > 1e-6);  // not exact, so the ratio below is meaningful
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("box scheme converges at second order on the plane wave") {
    auto error_at = [&](int nx, double dt, int steps) {
        Grid1D g(0.0, 2.0 * M_PI, nx, dt);
        PreissmanStepper stepper(g, MediumProfile::constant(g, 2.0, 0.5), SourceProfile::zero(),
                                 BoundarySpec::periodic());
        PreissmanLevel lvl = stepper.initial_exact(0.0, GaugeKind::analytic);
        for (int s = 0; s < steps; ++s) lvl = stepper.step(lvl);
        const auto nodal = stepper.nodal_states(lvl);
        double err = 0.0;
        for (int i = 0; i < lvl.nodes(); ++i) {
            const FieldPoint ex = exact_plane_wave(g.node(i), lvl.t, 2.0, 0.5);
            err = std::max({err, std::abs(nodal[i].H.y - ex.H.y), std::abs(nodal[i].E.z - ex.E.z)});
        }
        return err;
    };
    const double coarse = error_at(16, 0.05, 10);
    const double fine = error_at(32, 0.025, 20);
    CHECK(coarse > 1e-5);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("box scheme runs backward to its starting state") {
    const Grid1D g(0.0, 2.0 * M_PI, 9, 0.04);
    const MediumProfile med = wavy_medium(g);
    Rng rng(21u);

    PreissmanStepper forward(g, med, SourceProfile::zero(), BoundarySpec::periodic());
    PreissmanStepper backward(g, med, SourceProfile::zero(), BoundarySpec::periodic(), -g.dt);

    const PreissmanLevel start = forward.initial_sampled(random_nodal(rng, g, g.nx), 0.0);
    PreissmanLevel lvl = start;
    const int steps = 5;
    for (int s = 0; s < steps; ++s) lvl = forward.step(lvl);
    for (int s = 0; s < steps; ++s) lvl = backward.step(lvl);

    const double scale = std::max(1.0, max_abs_level(start));
    CHECK(level_diff(lvl, start) <= 1e-9 * scale);
    CHECK(std::abs(lvl.t - start.t) <= 1e-12);
}

TEST_CASE("box scheme is bitwise deterministic") {
    const Grid1D g(0.0, 2.0 * M_PI, 8, 0.04);
    const MediumProfile med = wavy_medium(g);
    Rng rng1(31u), rng2(31u);

    PreissmanStepper s1(g, med, SourceProfile::zero(), BoundarySpec::periodic());
    PreissmanStepper s2(g, med, SourceProfile::zero(), BoundarySpec::periodic());
    PreissmanLevel a1 = s1.initial_sampled(random_nodal(rng1, g, g.nx), 0.0);
    PreissmanLevel a2 = s2.initial_sampled(random_nodal(rng2, g, g.nx), 0.0);
    for (int s = 0; s < 3; ++s) {
        a1 = s1.step(a1);
        a2 = s2.step(a2);
    }
    CHECK(level_diff(a1, a2) == 0.0);
}

TEST_CASE("potential gauge shifts never reach the fields") {
    // Shifting V, U by time-independent profiles (with the compensating P, Q
    // shift) changes the potentials' trajectory but must reproduce the same
    // (H, E) to rounding. Exercise the pinned even-periodic branch, which is
    // where a bookkeeping mistake would show up.
    const Grid1D g(0.0, 2.0 * M_PI, 8, 0.04);
    const MediumProfile med = wavy_medium(g);
    Rng rng(41u);

    PreissmanStepper stepper(g, med, SourceProfile::zero(), BoundarySpec::periodic());
    PreissmanLevel plain = stepper.initial_sampled(random_nodal(rng, g, g.nx), 0.0);
    PreissmanLevel shifted = plain;

    FourierField1D fv(rng, g.x0, g.length, 2, 0.8), fu(rng, g.x0, g.length, 2, 0.8);
    apply_gauge_shift(shifted, g, [&](double x) { return V2{fv.value(x), fv.deriv(x)}; },
                      [&](double x) { return V2{fu.deriv(x), fu.value(x)}; });

    for (int s = 0; s < 3; ++s) {
        plain = stepper.step(plain);
        shifted = stepper.step(shifted);
    }
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        m = std::max({m, std::abs(plain.h[i].y - shifted.h[i].y), std::abs(plain.h[i].z - shifted.h[i].z),
                      std::abs(plain.e[i].y - shifted.e[i].y), std::abs(plain.e[i].z - shifted.e[i].z)});
    }
    CHECK(m <= 1e-11);
}

namespace {

double max_field(const FieldLevel& l) {
    double m = 0.0;
    for (const auto& fp : l.f)
        for (int c = 0; c < 3; ++c) m = std::max({m, std::abs(fp.H[c]), std::abs(fp.E[c])});
    return m;
}

double stencil_scale(const NinePointScheme& s, const MediumProfile& med, double maxfield) {
    double maxmed = 0.0;
    for (std::size_t i = 0; i < med.eps.size(); ++i) maxmed = std::max({maxmed, med.eps[i], med.mu[i]});
    return 8.0 * std::abs(s.dt()) * s.grid().dx() * std::max(1.0, maxmed) * std::max(1.0, maxfield);
}

double max_stencil_residual(const NinePointScheme& s, const FieldLevel& p, const FieldLevel& c,
                            const FieldLevel& n) {
    const bool periodic = static_cast<int>(p.f.size()) == s.grid().nx;
    const int lo = periodic ? 0 : 1;
    const int hi = periodic ? s.grid().nx - 1 : s.grid().nx - 1;
    double m = 0.0;
    for (int node = lo; node <= hi; ++node)
        for (double r : s.stencil_residual(p, c, n, node)) m = std::max(m, std::abs(r));
    return m;
}

}  // namespace

TEST_CASE("eliminating the potentials from box trajectories satisfies the two-step stencil") {
    SUBCASE("constant medium, exact start, both gauges") {
        const Grid1D g(0.0, 2.0 * M_PI, 16, 0.03);
        const MediumProfile med = MediumProfile::constant(g, 2.0, 0.5);
        for (GaugeKind gauge : {GaugeKind::analytic, GaugeKind::zero}) {
            PreissmanStepper box(g, med, SourceProfile::zero(), BoundarySpec::dirichlet_exact());
            NinePointScheme scheme(g, med, SourceProfile::zero(), BoundarySpec::dirichlet_exact());

            PreissmanLevel lvl = box.initial_exact(0.0, gauge);
            std::vector<FieldLevel> traj{{lvl.t, box.nodal_states(lvl)}};
            for (int s = 0; s < 6; ++s) {
                lvl = box.step(lvl);
                traj.push_back({lvl.t, box.nodal_states(lvl)});
            }
            double maxfield = 0.0;
            for (const auto& l : traj) maxfield = std::max(maxfield, max_field(l));
            const double tol = 1e-10 * stencil_scale(scheme, med, maxfield);
            for (std::size_t k = 2; k < traj.size(); ++k)
                CHECK(max_stencil_residual(scheme, traj[k - 2], traj[k - 1], traj[k]) <= tol);
        }
    }

    SUBCASE("varying medium, random start, odd periodic") {
        const Grid1D g(0.0, 2.0 * M_PI, 9, 0.04);
        const MediumProfile med = wavy_medium(g);
        Rng rng(51u);
        PreissmanStepper box(g, med, SourceProfile::zero(), BoundarySpec::periodic());
        NinePointScheme scheme(g, med, SourceProfile::zero(), BoundarySpec::periodic());

        PreissmanLevel lvl = box.initial_sampled(random_nodal(rng, g, g.nx), 0.0);
        std::vector<FieldLevel> traj{{lvl.t, box.nodal_states(lvl)}};
        for (int s = 0; s < 6; ++s) {
            lvl = box.step(lvl);
            traj.push_back({lvl.t, box.nodal_states(lvl)});
        }
        double maxfield = 0.0;
        for (const auto& l : traj) maxfield = std::max(maxfield, max_field(l));
        const double tol = 1e-10 * stencil_scale(scheme, med, maxfield);
        for (std::size_t k = 2; k < traj.size(); ++k)
            CHECK(max_stencil_residual(scheme, traj[k - 2], traj[k - 1], traj[k]) <= tol);
    }

    SUBCASE("even periodic grids eliminate too, checked through the assembled matrices") {
        // The stepper refuses even periodic grids (A is singular), but the
        // stencil identity itself still holds; verify via A z2 - B z1 - C z0.
        const Grid1D g(0.0, 2.0 * M_PI, 8, 0.04);
        const MediumProfile med = wavy_medium(g);
        Rng rng(52u);
        PreissmanStepper box(g, med, SourceProfile::zero(), BoundarySpec::periodic());
        const NinePointSystem sys = assemble_nine_point(g, med, g.dt, true);

        PreissmanLevel lvl = box.initial_sampled(random_nodal(rng, g, g.nx), 0.0);
        std::vector<std::vector<double>> zs;
        auto flatten6 = [](const std::vector<FieldPoint>& f) {
            std::vector<double> z;
            z.reserve(f.size() * 6);
            for (const auto& fp : f) {
                z.insert(z.end(), {fp.H.x, fp.H.y, fp.H.z, fp.E.x, fp.E.y, fp.E.z});
            }
            return z;
        };
        zs.push_back(flatten6(box.nodal_states(lvl)));
        for (int s = 0; s < 4; ++s) {
            lvl = box.step(lvl);
            zs.push_back(flatten6(box.nodal_states(lvl)));
        }
        for (std::size_t k = 2; k < zs.size(); ++k) {
            const auto an = sys.A.matvec(zs[k]);
            const auto bc = sys.B.matvec(zs[k - 1]);
            const auto cp = sys.C.matvec(zs[k - 2]);
            double m = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < an.size(); ++i) {
                m = std::max(m, std::abs(an[i] - bc[i] - cp[i]));
                scale = std::max({scale, std::abs(an[i]), std::abs(bc[i]), std::abs(cp[i])});
            }
            CHECK(m <= 1e-12 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("two-step scheme solves its own stencil and tracks the plane wave") {
    SUBCASE("post-step residuals vanish") {
        const Grid1D g(0.0, 2.0 * M_PI, 9, 0.04);
        const MediumProfile med = wavy_medium(g);
        Rng rng(61u);
        NinePointScheme scheme(g, med, SourceProfile::zero(), BoundarySpec::periodic());
        auto [prev, cur] = scheme.bootstrap_sampled(random_nodal(rng, g, g.nx), 0.0);
        for (int s = 0; s < 5; ++s) {
            const FieldLevel next = scheme.step(prev, cur);
            const double maxfield = std::max({max_field(prev), max_field(cur), max_field(next)});
            CHECK(max_stencil_residual(scheme, prev, cur, next) <= 1e-12 * stencil_scale(scheme, med, maxfield));
            prev = cur;
            cur = next;
        }
    }

    SUBCASE("exact trajectories leave second-order residuals") {
        auto residual_at = [&](int nx, double dt) {
            Grid1D g(0.0, 2.0 * M_PI, nx, dt);
            const MediumProfile med = MediumProfile::constant(g, 2.0, 0.5);
            NinePointScheme scheme(g, med, SourceProfile::zero(), BoundarySpec::dirichlet_exact());
            const FieldLevel p = scheme.sample_exact(0.2);
            const FieldLevel c = scheme.sample_exact(0.2 + dt);
            const FieldLevel n = scheme.sample_exact(0.2 + 2 * dt);
            // normalize away the 8*dt*dx row scaling so the ratio isolates
            // the truncation order
            return max_stencil_residual(scheme, p, c, n) / (8.0 * dt * g.dx());
        };
        const double coarse = residual_at(17, 0.02);
        const double fine = residual_at(34, 0.01);
        CHECK(coarse > 1e-7);
        CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.2));
    }

    SUBCASE("second-order convergence against the plane wave") {
        auto error_at = [&](int nx, double dt, int steps) {
            Grid1D g(0.0, 2.0 * M_PI, nx, dt);
            const MediumProfile med = MediumProfile::constant(g, 2.0, 0.5);
            NinePointScheme scheme(g, med, SourceProfile::zero(), BoundarySpec::dirichlet_exact());
            auto [prev, cur] = scheme.bootstrap_exact(0.0);
            for (int s = 0; s < steps; ++s) {
                FieldLevel next = scheme.step(prev, cur);
                prev = cur;
                cur = next;
            }
            double err = 0.0;
            for (int i = 0; i <= g.nx; ++i) {
                const FieldPoint ex = exact_plane_wave(g.node(i), cur.t, 2.0, 0.5);
                err = std::max({err, std::abs(cur.f[i].H.y - ex.H.y), std::abs(cur.f[i].E.z - ex.E.z)});
            }
            return err;
        };
        const double coarse = error_at(16, 0.05, 9);
        const double fine = error_at(32, 0.025, 18);
        CHECK(coarse > 1e-5);
        CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.25));
    }
}

TEST_CASE("two-step scheme runs backward to its starting levels") {
    const Grid1D g(0.0, 2.0 * M_PI, 9, 0.04);
    const MediumProfile med = wavy_medium(g);
    Rng rng(71u);

    NinePointScheme forward(g, med, SourceProfile::zero(), BoundarySpec::periodic());
    NinePointScheme backward(g, med, SourceProfile::zero(), BoundarySpec::periodic(), -g.dt);

    auto [z0, z1] = forward.bootstrap_sampled(random_nodal(rng, g, g.nx), 0.0);
    std::vector<FieldLevel> traj{z0, z1};
    for (int s = 0; s < 5; ++s) traj.push_back(forward.step(traj[traj.size() - 2], traj.back()));

    FieldLevel cur = traj[traj.size() - 2], prev = traj.back();
    for (int k = static_cast<int>(traj.size()) - 3; k >= 0; --k) {
        const FieldLevel out = backward.step(prev, cur);
        prev = cur;
        cur = out;
    }
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int c = 0; c < 3; ++c) m = std::max({m, std::abs(cur.f[i].H[c] - z0.f[i].H[c]),
                                                  std::abs(cur.f[i].E[c] - z0.f[i].E[c])});
    CHECK(m <= 1e-9 * std::max(1.0, max_field(z0)));
}

TEST_CASE("assembled two-step matrices expose the expected structure") {
    const Grid1D g(0.0, 2.0 * M_PI, 7, 0.05);
    const MediumProfile med = wavy_medium(g);
    const double dt = g.dt, dx = g.dx();

    SUBCASE("curl and mass couplings sit where elimination puts them") {
        const NinePointSystem sys = assemble_nine_point(g, med, dt, false);
        for (int m = 1; m < g.nx; ++m) {
            // A: H-row curl coupling to E at m+1 is dt * (e_x cross),
            // mirrored with opposite sign at m-1
            CHECK(sys.A.get(m, m + 1, 1, 5) == doctest::Approx(-dt));
            CHECK(sys.A.get(m, m + 1, 2, 4) == doctest::Approx(dt));
            CHECK(sys.A.get(m, m - 1, 1, 5) == doctest::Approx(dt));
            // B carries -2x the curl part of A and no mass
            CHECK(sys.B.get(m, m + 1, 1, 5) == doctest::Approx(2.0 * dt));
            CHECK(sys.B.get(m, m, 0, 0) == doctest::Approx(0.0));
            // C carries -1x the curl part and +1x the mass part
            CHECK(sys.C.get(m, m + 1, 1, 5) == doctest::Approx(dt));
            CHECK(sys.C.get(m, m, 0, 0) == doctest::Approx(dx * (med.mu[m - 1] + med.mu[m])));
            CHECK(sys.A.get(m, m, 0, 0) == doctest::Approx(dx * (med.mu[m - 1] + med.mu[m])));
            CHECK(sys.A.get(m, m, 3, 3) == doctest::Approx(dx * (med.eps[m - 1] + med.eps[m])));
        }
        // boundary blocks: identity in A, empty in B and C
        for (int c = 0; c < 6; ++c) {
            CHECK(sys.A.get(0, 0, c, c) == doctest::Approx(1.0));
            CHECK(sys.B.get(0, 0, c, c) == doctest::Approx(0.0));
            CHECK(sys.C.get(g.nx, g.nx, c, c) == doctest::Approx(0.0));
        }
    }

    SUBCASE("matrix action reproduces the stencil on random levels") {
        const NinePointSystem sys = assemble_nine_point(g, med, dt, true);
        NinePointScheme scheme(g, med, SourceProfile::zero(), BoundarySpec::periodic());
        Rng rng(81u);
        for (int rep = 0; rep < 5; ++rep) {
            FieldLevel p{0.0, {}}, c{dt, {}}, n{2 * dt, {}};
            for (auto* lvl : {&p, &c, &n}) {
                lvl->f.resize(g.nx);
                for (auto& fp : lvl->f)
                    for (int comp = 0; comp < 3; ++comp) {
                        fp.H[comp] = rng.symmetric(1.0);
                        fp.E[comp] = rng.symmetric(1.0);
                    }
            }
            auto flatten6 = [](const std::vector<FieldPoint>& f) {
                std::vector<double> z;
                z.reserve(f.size() * 6);
                for (const auto& fp : f) z.insert(z.end(), {fp.H.x, fp.H.y, fp.H.z, fp.E.x, fp.E.y, fp.E.z});
                return z;
            };
            const auto an = sys.A.matvec(flatten6(n.f));
            const auto bc = sys.B.matvec(flatten6(c.f));
            const auto cp = sys.C.matvec(flatten6(p.f));
            for (int m = 0; m < g.nx; ++m) {
                const auto rows = scheme.stencil_residual(p, c, n, m);
                for (int r = 0; r < 6; ++r) {
                    const double lhs = an[6 * m + r] - bc[6 * m + r] - cp[6 * m + r];
                    CHECK(lhs == doctest::Approx(rows[r]).epsilon(1e-12));
                }
            }
        }
    }

    SUBCASE("a four-cell periodic assembly is well formed even though stepping would be singular") {
        const Grid1D g4(0.0, 1.0, 4, 0.05);
        const NinePointSystem sys = assemble_nine_point(g4, MediumProfile::constant(g4, 1.0, 1.0), g4.dt, true);
        CHECK(sys.A.blocks() == 4);
        CHECK(sys.A.get(0, 1, 1, 5) == doctest::Approx(-g4.dt));
    }
}

TEST_CASE("two-step scheme rejects configurations the elimination cannot express") {
    const Grid1D g(0.0, 2.0 * M_PI, 8, 0.05);
    const MediumProfile med = MediumProfile::constant(g, 1.0, 1.0);

    SUBCASE("even periodic cell counts") {
        CHECK_THROWS_AS(NinePointScheme(g, med, SourceProfile::zero(), BoundarySpec::periodic()), ValidationError);
    }
    SUBCASE("magnetic currents") {
        SourceProfile src = SourceProfile::zero();
        src.K = [](double, double) { return Vec3{0.0, 1.0, 0.0}; };
        CHECK_THROWS_AS(NinePointScheme(g, med, src, BoundarySpec::dirichlet_exact()), ValidationError);
    }
    SUBCASE("exact boundaries over a varying medium") {
        CHECK_THROWS_AS(NinePointScheme(g, wavy_medium(g), SourceProfile::zero(), BoundarySpec::dirichlet_exact()),
                        ValidationError);
    }
}

TEST_CASE("two-field midpoint scheme") {
    SUBCASE("rejects spatially varying media") {
        const Grid1D g(0.0, 2.0 * M_PI, 8, 0.05);
        CHECK_THROWS_AS(MidpointTwoField(g, wavy_medium(g), SourceProfile::zero(), BoundarySpec::periodic()),
                        ValidationError);
    }

    SUBCASE("keeps a uniform state stationary") {
        const Vec3 H0{0.3, -0.8, 0.5}, E0{-0.1, 0.6, 1.1};
        for (int variant = 0; variant < 2; ++variant) {
            const Grid1D g(0.0, 2.0 * M_PI, 8, 0.05);
            const BoundarySpec bc =
                variant == 0 ? BoundarySpec::periodic() : BoundarySpec::dirichlet_fixed({H0, E0}, {H0, E0});
            MidpointTwoField stepper(g, MediumProfile::constant(g, 2.0, 0.5), SourceProfile::zero(), bc);
            TwoFieldLevel lvl =
                stepper.initial_sampled(std::vector<FieldPoint>(stepper.zero_level(0.0).nodes(), {H0, E0}), 0.0);
            for (int s = 0; s < 3; ++s) lvl = stepper.step(lvl);
            for (int i = 0; i < lvl.nodes(); ++i) {
                CHECK(std::abs(lvl.h[i].y - H0.y) <= 1e-13);
                CHECK(std::abs(lvl.h[i].z - H0.z) <= 1e-13);
                CHECK(std::abs(lvl.e[i].y - E0.y) <= 1e-13);
                CHECK(std::abs(lvl.e[i].z - E0.z) <= 1e-13);
            }
        }
    }

    SUBCASE("steps solve the four cell equations to rounding") {
        for (int nx : {8, 9}) {
            const Grid1D g(0.0, 2.0 * M_PI, nx, 0.04);
            Rng rng(90u + nx);
            MidpointTwoField stepper(g, MediumProfile::constant(g, 2.0, 0.5), SourceProfile::zero(),
                                     BoundarySpec::periodic());
            TwoFieldLevel a = stepper.initial_sampled(random_nodal(rng, g, nx), 0.0);
            for (int s = 0; s < 4; ++s) {
                const TwoFieldLevel b = stepper.step(a);
                double m = 0.0, fmax = 1.0;
                for (const auto& cell : stepper.box_residuals(a, b))
                    for (double r : cell) m = std::max(m, std::abs(r));
                for (int i = 0; i < nx; ++i)
                    fmax = std::max({fmax, std::abs(a.h[i].y), std::abs(a.h[i].z), std::abs(a.e[i].y),
                                     std::abs(a.e[i].z)});
                CHECK(m <= 1e-12 * (4.0 / g.dt + 2.0 / g.dx()) * fmax);
                a = b;
            }
        }
    }

    SUBCASE("exact trajectories leave second-order residuals") {
        auto residual_at = [&](int nx, double dt) {
            Grid1D g(0.0, 2.0 * M_PI, nx, dt);
            MidpointTwoField stepper(g, MediumProfile::constant(g, 2.0, 0.5), SourceProfile::zero(),
                                     BoundarySpec::periodic());
            const TwoFieldLevel a = stepper.initial_exact(0.3);
            const TwoFieldLevel b = stepper.initial_exact(0.3 + dt);
            double m = 0.0;
            for (const auto& cell : stepper.box_residuals(a, b))
                for (double r : cell) m = std::max(m, std::abs(r));
            return m;
        };
        const double coarse = residual_at(16, 0.02);
        const double fine = residual_at(32, 0.01);
        CHECK(coarse > 1e-6);
        CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.2));
    }

    SUBCASE("second-order convergence against the plane wave") {
        auto error_at = [&](int nx, double dt, int steps) {
            Grid1D g(0.0, 2.0 * M_PI, nx, dt);
            MidpointTwoField stepper(g, MediumProfile::constant(g, 2.0, 0.5), SourceProfile::zero(),
                                     BoundarySpec::dirichlet_exact());
            TwoFieldLevel lvl = stepper.initial_exact(0.0);
            for (int s = 0; s < steps; ++s) lvl = stepper.step(lvl);
            double err = 0.0;
            for (int i = 0; i <= nx; ++i) {
                const FieldPoint ex = exact_plane_wave(g.node(i), lvl.t, 2.0, 0.5);
                err = std::max({err, std::abs(lvl.h[i].y - ex.H.y), std::abs(lvl.e[i].z - ex.E.z)});
            }
            return err;
        };
        const double coarse = error_at(16, 0.05, 10);
        const double fine = error_at(32, 0.025, 20);
        CHECK(coarse > 1e-5);
        CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.25));
    }

    SUBCASE("runs backward to its starting state") {
        const Grid1D g(0.0, 2.0 * M_PI, 9, 0.04);
        const MediumProfile med = MediumProfile::constant(g, 2.0, 0.5);
        Rng rng(95u);
        MidpointTwoField forward(g, med, SourceProfile::zero(), BoundarySpec::periodic());
        MidpointTwoField backward(g, med, SourceProfile::zero(), BoundarySpec::periodic(), -g.dt);
        const TwoFieldLevel start = forward.initial_sampled(random_nodal(rng, g, g.nx), 0.0);
        TwoFieldLevel lvl = start;
        for (int s = 0; s < 5; ++s) lvl = forward.step(lvl);
        for (int s = 0; s < 5; ++s) lvl = backward.step(lvl);
        double m = 0.0;
        for (int i = 0; i < g.nx; ++i)
            m = std::max({m, std::abs(lvl.h[i].y - start.h[i].y), std::abs(lvl.h[i].z - start.h[i].z),
                          std::abs(lvl.e[i].y - start.e[i].y), std::abs(lvl.e[i].z - start.e[i].z)});
        CHECK(m <= 1e-9);
    }
}
