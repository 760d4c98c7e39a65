#include "msmx/cli.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "msmx/adjoint_lab.hpp"
#include "msmx/errors.hpp"
#include "msmx/exact.hpp"
#include "msmx/midpoint2.hpp"
#include "msmx/nine_point.hpp"
#include "msmx/preissman.hpp"

namespace msmx {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Config ingestion

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ValidationError(std::string("config: unknown key '") + item.key() + "' in " +
                                  where);
    }
}

double require_number(const json& obj, const char* key, const char* where) {
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ValidationError(std::string("config: ") + where + "." + key + " must be a number");
    return v.get<double>();
}

int require_integer(const json& obj, const char* key, const char* where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ValidationError(std::string("config: ") + where + "." + key + " must be an integer");
    return v.get<int>();
}

MediumExpr medium_entry(const json& v, const char* which) {
    if (v.is_number()) {
        MediumExpr e;
        e.c0 = v.get<double>();
        e.c1 = 0.0;
        e.trig = 0;
        if (!(e.c0 > 0.0))
            throw ValidationError(std::string("config: medium.") + which + " must be positive");
        return e;
    }
    if (v.is_string()) {
        const MediumExpr e = parse_medium_expr(v.get<std::string>());
        if (!(e.c0 - std::abs(e.c1) > 0.0))
            throw ValidationError(std::string("config: medium.") + which +
                                  " must stay positive over a full period");
        return e;
    }
    throw ValidationError(std::string("config: medium.") + which +
                          " must be a number or an expression string");
}

}  // namespace

double MediumExpr::operator()(double x) const {
    if (trig == 1) return c0 + c1 * std::sin(x);
    if (trig == 2) return c0 + c1 * std::cos(x);
    return c0;
}

std::string MediumExpr::describe() const {
    std::ostringstream os;
    os << c0;
    if (!constant()) {
        os << (c1 < 0.0 ? "-" : "+");
        if (std::abs(c1) != 1.0) os << std::abs(c1) << "*";
        os << (trig == 1 ? "sin(x)" : "cos(x)");
    }
    return os.str();
}

MediumExpr parse_medium_expr(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    const auto fail = [&text]() -> MediumExpr {
        throw ValidationError("medium: cannot parse expression '" + text +
                              "'; expected forms: '1.5', '2+sin(x)', '1+0.5*cos(x)'");
    };
    if (s.empty()) return fail();

    MediumExpr e;
    e.c0 = 0.0;
    const char* p = s.c_str();
    auto trig_at = [](const char* q, int* trig) -> const char* {
        if (std::strncmp(q, "sin(x)", 6) == 0) {
            *trig = 1;
            return q + 6;
        }
        if (std::strncmp(q, "cos(x)", 6) == 0) {
            *trig = 2;
            return q + 6;
        }
        return nullptr;
    };

    if (const char* q = trig_at(p, &e.trig)) {
        e.c1 = 1.0;
        p = q;
    } else {
        char* endp = nullptr;
        e.c0 = std::strtod(p, &endp);
        if (endp == p) return fail();
        p = endp;
        if (*p == '+' || *p == '-') {
            const double sign = *p == '+' ? 1.0 : -1.0;
            ++p;
            if (const char* q2 = trig_at(p, &e.trig)) {
                e.c1 = sign;
                p = q2;
            } else {
                endp = nullptr;
                const double coef = std::strtod(p, &endp);
                if (endp == p || *endp != '*') return fail();
                p = endp + 1;
                const char* q3 = trig_at(p, &e.trig);
                if (!q3) return fail();
                e.c1 = sign * coef;
                p = q3;
            }
        }
    }
    if (*p != '\0') return fail();
    return e;
}

int SimulationConfig::steps() const { return static_cast<int>(std::llround(t_end / dt)); }

SimulationConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config: document must be a JSON object");

    check_keys(doc,
               {"domain", "nx", "dt", "t_end", "scheme", "medium", "source", "bc", "ic", "output"},
               "the top level");

    std::string missing;
    for (const char* req : {"domain", "nx", "dt", "t_end", "scheme"})
        if (!doc.contains(req)) missing += missing.empty() ? req : std::string(", ") + req;
    if (!missing.empty())
        throw ValidationError("config: missing required fields: " + missing);

    SimulationConfig cfg;

    const json& dom = doc.at("domain");
    if (!dom.is_object()) throw ValidationError("config: domain must be an object");
    check_keys(dom, {"x0", "length"}, "domain");
    if (!dom.contains("x0") || !dom.contains("length"))
        throw ValidationError("config: domain needs x0 and length");
    cfg.x0 = require_number(dom, "x0", "domain");
    cfg.length = require_number(dom, "length", "domain");
    if (!(cfg.length > 0.0)) throw ValidationError("config: domain.length must be positive");

    if (!doc.at("nx").is_number_integer())
        throw ValidationError("config: nx must be an integer");
    cfg.nx = doc.at("nx").get<int>();
    if (cfg.nx < 8) throw ValidationError("config: nx must be at least 8");

    if (!doc.at("dt").is_number()) throw ValidationError("config: dt must be a number");
    cfg.dt = doc.at("dt").get<double>();
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");

    if (!doc.at("t_end").is_number()) throw ValidationError("config: t_end must be a number");
    cfg.t_end = doc.at("t_end").get<double>();
    if (cfg.t_end < 0.0) throw ValidationError("config: t_end must be nonnegative");
    const double ratio = cfg.t_end / cfg.dt;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9)
        throw ValidationError("config: t_end/dt must be an integer to within 1e-9");

    const std::string scheme = doc.at("scheme").get<std::string>();
    if (scheme == "nine_point")
        cfg.scheme = SchemeKind::nine_point;
    else if (scheme == "preissman")
        cfg.scheme = SchemeKind::preissman;
    else if (scheme == "midpoint_2field")
        cfg.scheme = SchemeKind::midpoint_2field;
    else
        throw ValidationError("config: scheme must be nine_point, preissman, or midpoint_2field");

    if (doc.contains("medium")) {
        const json& med = doc.at("medium");
        if (!med.is_object()) throw ValidationError("config: medium must be an object");
        check_keys(med, {"eps", "mu"}, "medium");
        if (med.contains("eps")) cfg.eps = medium_entry(med.at("eps"), "eps");
        if (med.contains("mu")) cfg.mu = medium_entry(med.at("mu"), "mu");
    }

    if (doc.contains("source")) {
        const json& src = doc.at("source");
        if (src.is_string()) {
            cfg.source.name = src.get<std::string>();
            if (cfg.source.name != "zero")
                throw ValidationError("config: named sources need an object with parameters");
        } else if (src.is_object()) {
            check_keys(src, {"name", "amplitude", "omega"}, "source");
            if (!src.contains("name")) throw ValidationError("config: source.name is required");
            cfg.source.name = src.at("name").get<std::string>();
            if (cfg.source.name != "zero" && cfg.source.name != "windowed_sine")
                throw ValidationError("config: source.name must be zero or windowed_sine");
            if (src.contains("amplitude"))
                cfg.source.amplitude = require_number(src, "amplitude", "source");
            if (src.contains("omega")) cfg.source.omega = require_number(src, "omega", "source");
        } else {
            throw ValidationError("config: source must be a string or an object");
        }
    }

    if (doc.contains("bc")) {
        const std::string bc = doc.at("bc").get<std::string>();
        if (bc == "periodic")
            cfg.bc = BoundarySpec::Kind::periodic;
        else if (bc == "dirichlet_exact")
            cfg.bc = BoundarySpec::Kind::dirichlet_exact;
        else if (bc == "dirichlet_zero")
            cfg.bc = BoundarySpec::Kind::dirichlet_fixed;
        else
            throw ValidationError(
                "config: bc must be periodic, dirichlet_exact, or dirichlet_zero");
    }

    if (doc.contains("ic")) {
        const json& ic = doc.at("ic");
        if (ic.is_string()) {
            cfg.ic.kind = ic.get<std::string>();
            if (cfg.ic.kind != "exact_plane_wave")
                throw ValidationError("config: ic must be exact_plane_wave or a sampled-data object");
        } else if (ic.is_object()) {
            check_keys(ic, {"kind", "gauge", "path"}, "ic");
            if (!ic.contains("kind")) throw ValidationError("config: ic.kind is required");
            cfg.ic.kind = ic.at("kind").get<std::string>();
            if (cfg.ic.kind == "exact_plane_wave") {
                if (ic.contains("path"))
                    throw ValidationError("config: ic.path applies to sampled initial data only");
                if (ic.contains("gauge")) {
                    const std::string g = ic.at("gauge").get<std::string>();
                    if (g == "analytic")
                        cfg.ic.gauge = GaugeKind::analytic;
                    else if (g == "zero")
                        cfg.ic.gauge = GaugeKind::zero;
                    else
                        throw ValidationError("config: ic.gauge must be analytic or zero");
                }
            } else if (cfg.ic.kind == "sampled") {
                if (ic.contains("gauge"))
                    throw ValidationError(
                        "config: ic.gauge applies to exact_plane_wave initial data only");
                if (!ic.contains("path"))
                    throw ValidationError("config: sampled initial data needs ic.path");
                cfg.ic.path = ic.at("path").get<std::string>();
            } else {
                throw ValidationError("config: ic.kind must be exact_plane_wave or sampled");
            }
        } else {
            throw ValidationError("config: ic must be a string or an object");
        }
    }

    if (doc.contains("output")) {
        const json& out = doc.at("output");
        if (!out.is_object()) throw ValidationError("config: output must be an object");
        check_keys(out, {"directory", "snapshot_stride"}, "output");
        if (out.contains("directory")) cfg.output.directory = out.at("directory").get<std::string>();
        if (out.contains("snapshot_stride")) {
            cfg.output.snapshot_stride = require_integer(out, "snapshot_stride", "output");
            if (cfg.output.snapshot_stride < 0)
                throw ValidationError("config: output.snapshot_stride must be nonnegative");
        }
    }

    // Cross-field contradictions worth rejecting before any work happens.
    if (cfg.scheme == SchemeKind::nine_point && cfg.bc == BoundarySpec::Kind::periodic &&
        cfg.nx % 2 == 0)
        throw ValidationError("config: nine_point with periodic bc needs an odd cell count");
    if (cfg.scheme == SchemeKind::midpoint_2field && !(cfg.eps.constant() && cfg.mu.constant()))
        throw ValidationError("config: midpoint_2field requires a spatially constant medium");

    return cfg;
}

SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    SimulationConfig cfg = parse_config(buf.str());
    if (cfg.ic.kind == "sampled") {
        fs::path p(cfg.ic.path);
        if (p.is_relative()) p = fs::path(path).parent_path() / p;
        if (!fs::exists(p))
            throw ValidationError("config: sampled initial data file does not exist: " +
                                  p.string());
        cfg.ic.path = p.string();
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// CSV emission

namespace {

FILE* open_for_write(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open " + path + " for writing");
    return f;
}

}  // namespace

void write_snapshot_csv(const std::string& path, const Snapshot& snap) {
    FILE* f = open_for_write(path);
    std::fputs(snap.with_exact ? "t,x,H1,H2,H3,E1,E2,E3,H2_exact,err_H2\n"
                               : "t,x,H1,H2,H3,E1,E2,E3\n",
               f);
    for (const SnapshotRow& r : snap.rows) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t, r.x, r.H.x, r.H.y,
                     r.H.z, r.E.x, r.E.y, r.E.z);
        if (snap.with_exact) std::fprintf(f, ",%.17g,%.17g", r.h2_exact, r.err_h2);
        std::fputc('\n', f);
    }
    std::fclose(f);
}

Snapshot read_snapshot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("snapshot csv " + path + ": empty file");
    Snapshot snap;
    if (line == "t,x,H1,H2,H3,E1,E2,E3,H2_exact,err_H2")
        snap.with_exact = true;
    else if (line != "t,x,H1,H2,H3,E1,E2,E3")
        throw ValidationError("snapshot csv " + path + ": unrecognized header");
    const int want = snap.with_exact ? 10 : 8;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v[10] = {};
        const char* p = line.c_str();
        for (int i = 0; i < want; ++i) {
            char* endp = nullptr;
            v[i] = std::strtod(p, &endp);
            if (endp == p)
                throw ValidationError("snapshot csv " + path + ": malformed row '" + line + "'");
            p = endp;
            if (i + 1 < want) {
                if (*p != ',')
                    throw ValidationError("snapshot csv " + path + ": malformed row '" + line +
                                          "'");
                ++p;
            }
        }
        if (*p != '\0')
            throw ValidationError("snapshot csv " + path + ": trailing characters in '" + line +
                                  "'");
        SnapshotRow r;
        r.t = v[0];
        r.x = v[1];
        r.H = {v[2], v[3], v[4]};
        r.E = {v[5], v[6], v[7]};
        r.h2_exact = v[8];
        r.err_h2 = v[9];
        snap.rows.push_back(r);
    }
    if (snap.rows.empty()) throw ValidationError("snapshot csv " + path + ": no data rows");
    return snap;
}

void write_msc_csv(const std::string& path, const ResidualReport& rep) {
    FILE* f = open_for_write(path);
    std::fputs("step,cell,residual\n", f);
    for (int s = 0; s < rep.nt; ++s)
        for (int c = 0; c < rep.nx; ++c)
            std::fprintf(f, "%d,%d,%.17g\n", s, c, rep.at(s, c));
    std::fclose(f);
}

void write_adjoint_csv(const std::string& path, const std::vector<AdjointCheckRow>& rows) {
    FILE* f = open_for_write(path);
    std::fputs("operator,medium,n,h,defect,scale,defect_over_h2\n", f);
    for (const AdjointCheckRow& r : rows)
        std::fprintf(f, "%s,\"%s\",%d,%.17g,%.17g,%.17g,%.17g\n", r.op.c_str(), r.medium.c_str(),
                     r.n, r.h, r.defect, r.scale, r.defect_over_h2);
    std::fclose(f);
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
    FILE* f = open_for_write(path);
    std::fputs("nx,dx,dt,linf,l2,order_linf,order_l2\n", f);
    for (const ConvergenceRow& r : rows) {
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g", r.nx, r.dx, r.dt, r.linf, r.l2);
        if (std::isfinite(r.order_linf))
            std::fprintf(f, ",%.17g", r.order_linf);
        else
            std::fputc(',', f);
        if (std::isfinite(r.order_l2))
            std::fprintf(f, ",%.17g\n", r.order_l2);
        else
            std::fputs(",\n", f);
    }
    std::fclose(f);
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

SourceProfile build_source(const SimulationConfig& cfg) {
    if (cfg.source.name == "zero") return SourceProfile::zero();
    // Transverse electric current, windowed to vanish at the domain ends so
    // every boundary kind accepts it; no magnetic current, so the eliminated
    // scheme accepts it too.
    const double x0 = cfg.x0, len = cfg.length;
    const double amp = cfg.source.amplitude, omega = cfg.source.omega;
    SourceProfile src;
    src.J = [x0, len, amp, omega](double x, double t) -> Vec3 {
        const double w = std::sin(kPi * (x - x0) / len);
        return {0.0, amp * w * w * std::sin(omega * t), 0.0};
    };
    return src;
}

BoundarySpec build_bc(const SimulationConfig& cfg) {
    switch (cfg.bc) {
        case BoundarySpec::Kind::periodic:
            return BoundarySpec::periodic();
        case BoundarySpec::Kind::dirichlet_exact:
            return BoundarySpec::dirichlet_exact();
        default:
            return BoundarySpec::dirichlet_fixed({}, {});
    }
}

std::vector<FieldPoint> sampled_nodal(const SimulationConfig& cfg, int nodes, double* t0) {
    const Snapshot snap = read_snapshot_csv(cfg.ic.path);
    if (static_cast<int>(snap.rows.size()) != nodes)
        throw ValidationError("sampled initial data has " + std::to_string(snap.rows.size()) +
                              " rows; the grid needs " + std::to_string(nodes) + " nodes");
    std::vector<FieldPoint> nodal(snap.rows.size());
    for (std::size_t i = 0; i < snap.rows.size(); ++i) {
        if (snap.rows[i].t != snap.rows[0].t)
            throw ValidationError("sampled initial data must hold a single time level");
        nodal[i] = {snap.rows[i].H, snap.rows[i].E};
    }
    *t0 = snap.rows[0].t;
    return nodal;
}

struct RunOutcome {
    RunReport report;
    FieldLevel final_level;  // nodal (H, E) at t_end
    std::vector<double> xs;  // node coordinates
    bool periodic = false;
};

// Shared time loop: the three schemes differ in state representation, so the
// loop is parameterized over (bootstrap, advance, read-out) closures.
RunOutcome run_core(const SimulationConfig& cfg, const std::string& out_dir) {
    const auto t_start = std::chrono::steady_clock::now();
    const Grid1D grid = cfg.grid();
    const MediumProfile medium =
        MediumProfile::from_functions(grid, [&](double x) { return cfg.eps(x); },
                                      [&](double x) { return cfg.mu(x); });
    const SourceProfile src = build_source(cfg);
    const BoundarySpec bc = build_bc(cfg);
    const bool periodic = cfg.bc == BoundarySpec::Kind::periodic;
    const int nsteps = cfg.steps();
    const bool with_exact = cfg.ic.kind == "exact_plane_wave";
    if (with_exact && !(cfg.eps.constant() && cfg.mu.constant()))
        throw ValidationError(
            "exact_plane_wave initial data requires a spatially constant medium");
    const double eps0 = cfg.eps(cfg.x0), mu0 = cfg.mu(cfg.x0);

    RunOutcome out;
    out.periodic = periodic;

    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    }

    auto snapshot_of = [&](const FieldLevel& lvl) {
        Snapshot snap;
        snap.with_exact = with_exact;
        snap.rows.resize(lvl.f.size());
        for (std::size_t i = 0; i < lvl.f.size(); ++i) {
            SnapshotRow& r = snap.rows[i];
            r.t = lvl.t;
            r.x = grid.node(static_cast<int>(i));
            r.H = lvl.f[i].H;
            r.E = lvl.f[i].E;
            if (with_exact) {
                const FieldPoint ex = exact_plane_wave(r.x, lvl.t, eps0, mu0);
                r.h2_exact = ex.H.y;
                r.err_h2 = r.H.y - ex.H.y;
            }
        }
        return snap;
    };

    std::string last_snapshot_name;
    auto emit = [&](const FieldLevel& lvl, int step) {
        if (out_dir.empty()) return;
        const bool due = step == 0 || step == nsteps ||
                         (cfg.output.snapshot_stride > 0 && step % cfg.output.snapshot_stride == 0);
        if (!due) return;
        char name[40];
        std::snprintf(name, sizeof name, "snapshot_%06d.csv", step);
        write_snapshot_csv((fs::path(out_dir) / name).string(), snapshot_of(lvl));
        last_snapshot_name = name;
    };

    // Bootstrap + stepping per scheme, all reduced to nodal FieldLevels.
    std::vector<FieldLevel> kept;  // first and final levels for the energy summary
    FieldLevel final_level;
    auto guard_step = [&](int step, auto&& fn) {
        try {
            return fn();
        } catch (const NumericalError& e) {
            throw NumericalError("step " + std::to_string(step) + ": " + e.what());
        }
    };

    if (cfg.scheme == SchemeKind::nine_point) {
        NinePointScheme scheme(grid, medium, src, bc);
        FieldLevel prev, cur;
        if (with_exact) {
            if (nsteps == 0) {
                cur = scheme.sample_exact(0.0);
            } else {
                auto boot = scheme.bootstrap_exact(0.0);
                prev = boot.first;
                cur = boot.second;
                emit(prev, 0);
            }
        } else {
            double t0 = 0.0;
            const std::vector<FieldPoint> nodal = sampled_nodal(cfg, scheme.nodes(), &t0);
            if (nsteps == 0) {
                cur.t = t0;
                cur.f = nodal;
            } else {
                auto boot = scheme.bootstrap_sampled(nodal, t0);
                prev = boot.first;
                cur = boot.second;
                emit(prev, 0);
            }
        }
        if (nsteps == 0) emit(cur, 0);
        kept.push_back(nsteps == 0 ? cur : prev);
        emit(cur, 1);
        for (int s = 2; s <= nsteps; ++s) {
            FieldLevel next = guard_step(s, [&] { return scheme.step(prev, cur); });
            prev = std::move(cur);
            cur = std::move(next);
            emit(cur, s);
        }
        final_level = cur;
    } else if (cfg.scheme == SchemeKind::preissman) {
        PreissmanStepper stepper(grid, medium, src, bc);
        PreissmanLevel lvl;
        if (with_exact) {
            lvl = stepper.initial_exact(0.0, cfg.ic.gauge);
        } else {
            double t0 = 0.0;
            const int nodes = periodic ? grid.nx : grid.nx + 1;
            const std::vector<FieldPoint> nodal = sampled_nodal(cfg, nodes, &t0);
            lvl = stepper.initial_sampled(nodal, t0);
        }
        auto as_level = [&](const PreissmanLevel& l) {
            FieldLevel fl;
            fl.t = l.t;
            fl.f = stepper.nodal_states(l);
            return fl;
        };
        kept.push_back(as_level(lvl));
        emit(kept.back(), 0);
        for (int s = 1; s <= nsteps; ++s) {
            lvl = guard_step(s, [&] { return stepper.step(lvl); });
            if (s == nsteps)
                final_level = as_level(lvl);
            else
                emit(as_level(lvl), s);
        }
        if (nsteps == 0) final_level = kept.front();
        emit(final_level, nsteps);
    } else {
        MidpointTwoField stepper(grid, medium, src, bc);
        TwoFieldLevel lvl;
        if (with_exact) {
            lvl = stepper.initial_exact(0.0);
        } else {
            double t0 = 0.0;
            const int nodes = periodic ? grid.nx : grid.nx + 1;
            const std::vector<FieldPoint> nodal = sampled_nodal(cfg, nodes, &t0);
            lvl = stepper.initial_sampled(nodal, t0);
        }
        auto as_level = [&](const TwoFieldLevel& l) {
            FieldLevel fl;
            fl.t = l.t;
            fl.f = stepper.nodal_states(l);
            return fl;
        };
        kept.push_back(as_level(lvl));
        emit(kept.back(), 0);
        for (int s = 1; s <= nsteps; ++s) {
            lvl = guard_step(s, [&] { return stepper.step(lvl); });
            if (s == nsteps)
                final_level = as_level(lvl);
            else
                emit(as_level(lvl), s);
        }
        if (nsteps == 0) final_level = kept.front();
        emit(final_level, nsteps);
    }

    RunReport& rep = out.report;
    rep.steps = nsteps;
    rep.t_end = cfg.t_end;
    rep.has_exact = with_exact;
    if (with_exact) {
        const double dx = grid.dx();
        double linf = 0.0, l2acc = 0.0, linf_h2 = 0.0;
        for (std::size_t i = 0; i < final_level.f.size(); ++i) {
            const double x = grid.node(static_cast<int>(i));
            const FieldPoint ex = exact_plane_wave(x, final_level.t, eps0, mu0);
            const Vec3 dh = final_level.f[i].H - ex.H;
            const Vec3 de = final_level.f[i].E - ex.E;
            for (int c = 0; c < 3; ++c) {
                linf = std::max({linf, std::abs(dh[c]), std::abs(de[c])});
            }
            linf_h2 = std::max(linf_h2, std::abs(dh.y));
            l2acc += dot(dh, dh) + dot(de, de);
        }
        rep.linf = linf;
        rep.l2 = std::sqrt(dx * l2acc);
        rep.linf_H2 = linf_h2;
    }
    kept.push_back(final_level);
    const std::vector<double> energy = energy_diagnostic(kept, grid, medium);
    rep.energy_initial = energy.front();
    rep.energy_final = energy.back();
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    out.final_level = std::move(final_level);
    out.xs.resize(static_cast<std::size_t>(periodic ? grid.nx : grid.nx + 1));
    for (std::size_t i = 0; i < out.xs.size(); ++i) out.xs[i] = grid.node(static_cast<int>(i));

    if (!out_dir.empty()) {
        FILE* f = open_for_write((fs::path(out_dir) / "report.txt").string());
        std::fprintf(f, "steps: %d\n", rep.steps);
        std::fprintf(f, "t_end: %s\n", fmt17(rep.t_end).c_str());
        std::fprintf(f, "wall_seconds: %s\n", fmt17(rep.wall_seconds).c_str());
        if (rep.has_exact) {
            std::fprintf(f, "linf: %s\n", fmt17(rep.linf).c_str());
            std::fprintf(f, "l2: %s\n", fmt17(rep.l2).c_str());
            std::fprintf(f, "linf_H2: %s\n", fmt17(rep.linf_H2).c_str());
        }
        std::fprintf(f, "energy_initial: %s\n", fmt17(rep.energy_initial).c_str());
        std::fprintf(f, "energy_final: %s\n", fmt17(rep.energy_final).c_str());
        std::fclose(f);

        FILE* g = open_for_write((fs::path(out_dir) / "plot.gp").string());
        std::fprintf(g, "set datafile separator ','\n");
        std::fprintf(g, "set key outside\n");
        std::fprintf(g, "plot '%s' using 2:4 with lines title 'H2'", last_snapshot_name.c_str());
        if (with_exact)
            std::fprintf(g,
                         ", '%s' using 2:9 with lines title 'H2 exact', '%s' using 2:10 with "
                         "lines title 'error'",
                         last_snapshot_name.c_str(), last_snapshot_name.c_str());
        std::fputc('\n', g);
        std::fclose(g);
    }

    return out;
}

}  // namespace

RunReport run_simulation(const SimulationConfig& cfg, const std::string& out_dir) {
    return run_core(cfg, out_dir).report;
}

std::vector<ConvergenceRow> convergence_study(const SimulationConfig& cfg, int levels) {
    if (levels < 3)
        throw ValidationError("convergence study needs at least 3 levels for an order estimate");
    if (cfg.ic.kind != "exact_plane_wave")
        throw ValidationError("convergence study needs exact_plane_wave initial data");
    std::vector<ConvergenceRow> rows;
    rows.reserve(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k) {
        SimulationConfig c = cfg;
        c.nx = cfg.nx << k;
        c.dt = cfg.dt / (1 << k);
        c.output.snapshot_stride = 0;
        const RunReport rep = run_simulation(c, "");
        ConvergenceRow row;
        row.nx = c.nx;
        row.dx = c.grid().dx();
        row.dt = c.dt;
        row.linf = rep.linf;
        row.l2 = rep.l2;
        row.order_linf = row.order_l2 = std::nan("");
        if (k > 0) {
            const ConvergenceRow& prev = rows.back();
            if (prev.linf > 0.0 && row.linf > 0.0) row.order_linf = std::log2(prev.linf / row.linf);
            if (prev.l2 > 0.0 && row.l2 > 0.0) row.order_l2 = std::log2(prev.l2 / row.l2);
        }
        rows.push_back(row);
    }
    return rows;
}

ResidualReport msc_check(const SimulationConfig& cfg, std::uint64_t seed_a, std::uint64_t seed_b) {
    if (cfg.scheme == SchemeKind::nine_point)
        throw ValidationError(
            "msc-check: the nine-point form carries no auxiliary-field tangents; use scheme "
            "preissman (or midpoint_2field for the reduced law)");
    const Grid1D grid = cfg.grid();
    const MediumProfile medium =
        MediumProfile::from_functions(grid, [&](double x) { return cfg.eps(x); },
                                      [&](double x) { return cfg.mu(x); });
    const BoundarySpec bc = build_bc(cfg);
    const int nsteps = cfg.steps();
    if (nsteps < 1) throw ValidationError("msc-check: needs at least one step (t_end >= dt)");
    if (cfg.scheme == SchemeKind::preissman) {
        const TangentPair pair = make_tangent_pair(grid, medium, bc, nsteps, seed_a, seed_b);
        return msc_residual_preissman(pair, grid, medium);
    }
    const TangentPair2F pair = make_tangent_pair_2field(grid, medium, bc, nsteps, seed_a, seed_b);
    return msc_residual_2field(pair, grid, medium);
}

std::vector<AdjointCheckRow> adjoint_check(const std::string& op_kind,
                                           const std::string& medium_spec, int n) {
    OpKind kind;
    if (op_kind == "G")
        kind = OpKind::G;
    else if (op_kind == "G1")
        kind = OpKind::G1;
    else if (op_kind == "G2")
        kind = OpKind::G2;
    else
        throw ValidationError("adjoint-check: operator kind must be G, G1, or G2");

    // Medium spec "eps=<expr>,mu=<expr>"; either half may be omitted.
    MediumExpr eps, mu;
    std::string spec;
    for (char c : medium_spec)
        if (!std::isspace(static_cast<unsigned char>(c))) spec.push_back(c);
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t end = spec.find(',', pos);
        if (end == std::string::npos) end = spec.size();
        const std::string part = spec.substr(pos, end - pos);
        if (part.rfind("eps=", 0) == 0)
            eps = parse_medium_expr(part.substr(4));
        else if (part.rfind("mu=", 0) == 0)
            mu = parse_medium_expr(part.substr(3));
        else if (!part.empty())
            throw ValidationError("adjoint-check: medium spec parts must look like eps=... or "
                                  "mu=..., got '" +
                                  part + "'");
        pos = end + 1;
    }

    const std::string label = "eps=" + eps.describe() + ",mu=" + mu.describe();
    const MediumFn eps_fn = [eps](double x, double, double, double) { return eps(x); };
    const MediumFn mu_fn = [mu](double x, double, double, double) { return mu(x); };

    std::vector<AdjointCheckRow> rows;
    for (int level = 0; level < 2; ++level) {
        const int nn = n << level;
        const SpaceTimeGrid grid(nn, 2 * nn, 2.0 * kPi, 2.0 * kPi);
        const GridOperator op = discretize_operator(kind, grid, eps_fn, mu_fn, label);
        const std::vector<double> psi = sample_field(grid, random_field_function(2026, grid.box, grid.horizon));
        const std::vector<double> phi = sample_field(grid, random_field_function(2027, grid.box, grid.horizon));
        const double s1 = vainberg_action(op, psi, phi);
        const double s2 = vainberg_action(op, phi, psi);
        AdjointCheckRow row;
        row.op = op_kind;
        row.medium = label;
        row.n = nn;
        row.h = grid.dx();
        row.defect = s1 - s2;
        row.scale = std::abs(s1) + std::abs(s2);
        row.defect_over_h2 = row.defect / (grid.dx() * grid.dx());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace msmx
