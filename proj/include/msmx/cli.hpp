#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msmx/conservation.hpp"
#include "msmx/grid.hpp"
#include "msmx/scheme_common.hpp"

namespace msmx {

enum class SchemeKind { nine_point, preissman, midpoint_2field };

// One medium profile term, c0 + c1 * trig(x), parsed from strings like "1",
// "2+sin(x)", "1.5-0.5*cos(x)". Enough to express every profile the test
// problems use while keeping configs grep-able.
struct MediumExpr {
    double c0 = 1.0;
    double c1 = 0.0;
    int trig = 0;  // 0 none, 1 sin, 2 cos

    double operator()(double x) const;
    [[nodiscard]] bool constant() const { return c1 == 0.0 || trig == 0; }
    [[nodiscard]] std::string describe() const;
};

MediumExpr parse_medium_expr(const std::string& text);

struct SourceSpec {
    std::string name = "zero";  // "zero" or "windowed_sine"
    double amplitude = 0.0;
    double omega = 0.0;
};

struct IcSpec {
    std::string kind = "exact_plane_wave";  // or "sampled"
    GaugeKind gauge = GaugeKind::analytic;
    std::string path;  // sampled data file
};

struct OutputSpec {
    std::string directory = "out";
    int snapshot_stride = 0;  // 0: first and final levels only
};

struct SimulationConfig {
    double x0 = 0.0;
    double length = 0.0;
    int nx = 0;
    double dt = 0.0;
    double t_end = 0.0;
    SchemeKind scheme = SchemeKind::nine_point;
    MediumExpr eps, mu;
    SourceSpec source;
    BoundarySpec::Kind bc = BoundarySpec::Kind::dirichlet_exact;
    IcSpec ic;
    OutputSpec output;

    [[nodiscard]] int steps() const;
    [[nodiscard]] Grid1D grid() const { return {x0, length, nx, dt}; }
};

// Validates and resolves defaults; rejects unknown keys at every level so a
// typo cannot silently fall back to a default.
SimulationConfig parse_config(const std::string& json_text);

// File wrapper around parse_config; also resolves the sampled-data path
// against the config's directory and requires it to exist.
SimulationConfig load_config(const std::string& path);

struct RunReport {
    int steps = 0;
    double t_end = 0.0;
    double wall_seconds = 0.0;
    bool has_exact = false;  // norms below compare against the plane wave
    double linf = 0.0;
    double l2 = 0.0;
    double linf_H2 = 0.0;
    double energy_initial = 0.0;
    double energy_final = 0.0;
};

// Bootstraps, steps to t_end, writes snapshot CSVs plus report.txt and a
// gnuplot script into out_dir (empty string suppresses all file output).
RunReport run_simulation(const SimulationConfig& cfg, const std::string& out_dir);

struct ConvergenceRow {
    int nx = 0;
    double dx = 0.0;
    double dt = 0.0;
    double linf = 0.0;
    double l2 = 0.0;
    double order_linf = 0.0;  // NaN on the first row or when undefined
    double order_l2 = 0.0;
};

// Reruns the configured experiment `levels` times, halving dx and dt
// together; observed order is log2 of successive error quotients.
std::vector<ConvergenceRow> convergence_study(const SimulationConfig& cfg, int levels);

// Builds a tangent pair from the two seeds and evaluates the discrete
// conservation law across the configured run.
ResidualReport msc_check(const SimulationConfig& cfg, std::uint64_t seed_a, std::uint64_t seed_b);

struct AdjointCheckRow {
    std::string op;
    std::string medium;
    int n = 0;
    double h = 0.0;
    double defect = 0.0;
    double scale = 0.0;
    double defect_over_h2 = 0.0;
};

// Discretizes the named operator at n and 2n samples per axis, with the
// medium given as "eps=<expr>,mu=<expr>", and reports the symmetry defect on
// seeded test fields at both levels.
std::vector<AdjointCheckRow> adjoint_check(const std::string& op_kind,
                                           const std::string& medium_spec, int n);

// Snapshot CSV: header t,x,H1,H2,H3,E1,E2,E3 and, when exact values ride
// along, H2_exact,err_H2. Values go out through %.17g, so reading a snapshot
// back reproduces every double bitwise.
struct SnapshotRow {
    double t = 0.0;
    double x = 0.0;
    Vec3 H, E;
    double h2_exact = 0.0;
    double err_h2 = 0.0;
};

struct Snapshot {
    bool with_exact = false;
    std::vector<SnapshotRow> rows;
};

void write_snapshot_csv(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot_csv(const std::string& path);

void write_msc_csv(const std::string& path, const ResidualReport& rep);
void write_adjoint_csv(const std::string& path, const std::vector<AdjointCheckRow>& rows);
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

}  // namespace msmx
