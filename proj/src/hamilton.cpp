#include "msmx/hamilton.hpp"

#include <cmath>

#include "msmx/errors.hpp"

namespace msmx {

double covariant_hamiltonian(const ExtendedState& z, double eps, double mu, const Vec3& J, const Vec3& K) {
    return dot(z.P, z.H) + dot(z.Q, z.E) - 0.5 * mu * dot(z.H, z.H) - 0.5 * eps * dot(z.E, z.E) +
           dot(z.U, J) + dot(z.V, K);
}

State18 grad_S(const ExtendedState& z, double eps, double mu, const Vec3& J, const Vec3& K) {
    ExtendedState g;
    g.H = z.P - mu * z.H;
    g.E = z.Q - eps * z.E;
    g.V = K;
    g.U = J;
    g.P = z.H;
    g.Q = z.E;
    return to_flat(g);
}

Momenta legendre_momenta(const Vec3& V_t, const Vec3& U_t, const Vec3& curlU, const Vec3& curlV, double eps,
                         double mu) {
    Momenta m;
    m.P = mu * V_t + 0.5 * curlU;
    m.Q = eps * U_t - 0.5 * curlV;
    return m;
}

namespace {

const Vec3& need(const std::optional<Vec3>& slot, const char* name) {
    if (!slot) throw ValidationError(std::string("lagrangian: missing required input ") + name);
    return *slot;
}

Vec3 opt(const std::optional<Vec3>& slot) { return slot ? *slot : Vec3{}; }

}  // namespace

double lagrangian_density(LagrangianVariant variant, const LagrangianInputs& in, double eps, double mu) {
    switch (variant) {
        case LagrangianVariant::L1: {
            const Vec3 h = opt(in.H), e = opt(in.E);
            const Vec3& ch = need(in.curlH, "curlH");
            const Vec3& ce = need(in.curlE, "curlE");
            const Vec3& et = need(in.E_t, "E_t");
            return 0.5 * dot(h, ch) + 0.5 * dot(e, ce) - mu * dot(h, et) - dot(h, opt(in.J)) +
                   dot(e, opt(in.K));
        }
        case LagrangianVariant::L2: {
            const Vec3 h = opt(in.H), e = opt(in.E);
            const Vec3& ch = need(in.curlH, "curlH");
            const Vec3& ce = need(in.curlE, "curlE");
            const Vec3& et = need(in.E_t, "E_t");
            return (0.5 / eps) * dot(h, ch) + (0.5 / mu) * dot(e, ce) - dot(h, et) -
                   (1.0 / eps) * dot(h, opt(in.J)) + (1.0 / mu) * dot(e, opt(in.K));
        }
        case LagrangianVariant::LPotential: {
            const Vec3& vt = need(in.V_t, "V_t");
            const Vec3& ut = need(in.U_t, "U_t");
            const Vec3& cv = need(in.curlV, "curlV");
            const Vec3& cu = need(in.curlU, "curlU");
            return 0.5 * mu * dot(vt, vt) + 0.5 * dot(vt, cu) + 0.5 * eps * dot(ut, ut) -
                   0.5 * dot(ut, cv) - dot(opt(in.U), opt(in.J)) - dot(opt(in.V), opt(in.K));
        }
    }
    throw ValidationError("lagrangian: unknown variant");
}

SampledField2D SampledField2D::sample(const std::function<ExtendedState(double, double)>& f, int nx, int nt,
                                      double x0, double t0, double dx, double dt) {
    if (nx < 1 || nt < 1) throw ValidationError("sampled field: empty grid");
    SampledField2D out;
    out.nx = nx;
    out.nt = nt;
    out.x0 = x0;
    out.t0 = t0;
    out.dx = dx;
    out.dt = dt;
    out.values.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nt));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j) out.at(i, j) = to_flat(f(x0 + i * dx, t0 + j * dt));
    return out;
}

PdeResidualReport pde_residual(const SampledField2D& field, const MsStructure& s,
                               const std::function<double(double)>& eps_fn,
                               const std::function<double(double)>& mu_fn,
                               const std::function<Vec3(double, double)>& J_fn,
                               const std::function<Vec3(double, double)>& K_fn) {
    if (field.nx < 5 || field.nt < 5) throw ValidationError("pde residual: need at least 5 samples per axis");

    // 4th-order central first derivative along one index direction.
    const auto d4 = [](const State18& m2, const State18& m1, const State18& p1, const State18& p2, double h) {
        State18 out{};
        for (std::size_t k = 0; k < 18; ++k) out[k] = (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h);
        return out;
    };

    PdeResidualReport rep;
    rep.nx_interior = field.nx - 4;
    rep.nt_interior = field.nt - 4;
    rep.residual.resize(static_cast<std::size_t>(rep.nx_interior) * static_cast<std::size_t>(rep.nt_interior));

    for (int i = 2; i < field.nx - 2; ++i) {
        const double x = field.x0 + i * field.dx;
        const double eps = eps_fn(x);
        const double mu = mu_fn(x);
        for (int j = 2; j < field.nt - 2; ++j) {
            const double t = field.t0 + j * field.dt;
            const State18 zt = d4(field.at(i, j - 2), field.at(i, j - 1), field.at(i, j + 1), field.at(i, j + 2), field.dt);
            const State18 zx = d4(field.at(i - 2, j), field.at(i - 1, j), field.at(i + 1, j), field.at(i + 2, j), field.dx);
            const State18 mzt = mat18_apply(s.M, zt);
            const State18 kzx = mat18_apply(s.K1, zx);
            const State18 g = grad_S(from_flat(field.at(i, j)), eps, mu, J_fn(x, t), K_fn(x, t));
            State18 r{};
            for (std::size_t k = 0; k < 18; ++k) {
                r[k] = mzt[k] + kzx[k] - g[k];
                const double a = std::abs(r[k]);
                if (a > rep.max_abs) rep.max_abs = a;
            }
            rep.residual[static_cast<std::size_t>(i - 2) * static_cast<std::size_t>(rep.nt_interior) + static_cast<std::size_t>(j - 2)] = r;
        }
    }
    return rep;
}

}  // namespace msmx
