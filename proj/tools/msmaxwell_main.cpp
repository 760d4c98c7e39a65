// msmaxwell: drive the 1D Maxwell box schemes from JSON configs.
//
// Subcommands:
//   run           integrate a configured experiment, write snapshots + report
//   convergence   rerun with dx, dt halved together; report observed orders
//   msc-check     evaluate the discrete conservation law on random tangents
//   adjoint-check symmetry defect of a space-time operator at two resolutions
//
// Exit codes: 0 success, 1 bad input or config, 2 numerical failure, 3 I/O.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msmx/cli.hpp"
#include "msmx/errors.hpp"

namespace {

namespace fs = std::filesystem;

int do_run(const std::string& config_path, const std::string& out_override) {
    msmx::SimulationConfig cfg = msmx::load_config(config_path);
    const std::string out_dir = out_override.empty() ? cfg.output.directory : out_override;
    const msmx::RunReport rep = msmx::run_simulation(cfg, out_dir);
    std::printf("run: %d steps to t = %.17g in %.3f s\n", rep.steps, rep.t_end, rep.wall_seconds);
    if (rep.has_exact)
        std::printf("errors vs exact: Linf %.6e  L2 %.6e  Linf(H2) %.6e\n", rep.linf, rep.l2,
                    rep.linf_H2);
    std::printf("energy: %.17g -> %.17g\n", rep.energy_initial, rep.energy_final);
    std::printf("output: %s\n", out_dir.c_str());
    return 0;
}

int do_convergence(const std::string& config_path, int levels, const std::string& out_override) {
    msmx::SimulationConfig cfg = msmx::load_config(config_path);
    const auto rows = msmx::convergence_study(cfg, levels);
    std::printf("%6s %12s %12s %12s %12s %8s %8s\n", "nx", "dx", "dt", "Linf", "L2", "p_inf",
                "p_2");
    for (const auto& r : rows) {
        std::printf("%6d %12.5e %12.5e %12.5e %12.5e", r.nx, r.dx, r.dt, r.linf, r.l2);
        if (std::isfinite(r.order_linf))
            std::printf(" %8.3f %8.3f\n", r.order_linf, r.order_l2);
        else
            std::printf(" %8s %8s\n", "-", "-");
    }
    const std::string out_dir = out_override.empty() ? cfg.output.directory : out_override;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw msmx::IoError("cannot create output directory " + out_dir + ": " + ec.message());
    const std::string csv = (fs::path(out_dir) / "convergence.csv").string();
    msmx::write_convergence_csv(csv, rows);
    std::printf("wrote %s\n", csv.c_str());
    return 0;
}

int do_msc_check(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
                 const std::string& out_override) {
    msmx::SimulationConfig cfg = msmx::load_config(config_path);
    const msmx::ResidualReport rep = msmx::msc_check(cfg, seeds[0], seeds[1]);
    std::printf("msc-check: %d cells x %d steps, seeds %" PRIu64 "/%" PRIu64 "\n", rep.nx, rep.nt,
                seeds[0], seeds[1]);
    std::printf("max |residual| %.6e  scale %.6e  relative %.6e\n", rep.max_abs, rep.scale,
                rep.relative());
    const std::string out_dir = out_override.empty() ? cfg.output.directory : out_override;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw msmx::IoError("cannot create output directory " + out_dir + ": " + ec.message());
    const std::string csv = (fs::path(out_dir) / "msc_residuals.csv").string();
    msmx::write_msc_csv(csv, rep);
    std::printf("wrote %s\n", csv.c_str());
    return 0;
}

int do_adjoint_check(const std::string& op, const std::string& medium, int n,
                     const std::string& out_dir) {
    const auto rows = msmx::adjoint_check(op, medium, n);
    std::printf("%4s %-24s %4s %12s %14s %14s %14s\n", "op", "medium", "n", "h", "defect", "scale",
                "defect/h^2");
    for (const auto& r : rows)
        std::printf("%4s %-24s %4d %12.5e %14.6e %14.6e %14.6e\n", r.op.c_str(), r.medium.c_str(),
                    r.n, r.h, r.defect, r.scale, r.defect_over_h2);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw msmx::IoError("cannot create output directory " + out_dir + ": " + ec.message());
    const std::string csv = (fs::path(out_dir) / "adjoint_check.csv").string();
    msmx::write_adjoint_csv(csv, rows);
    std::printf("wrote %s\n", csv.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structure-preserving box schemes for 1D Maxwell systems"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    auto* run = app.add_subcommand("run", "integrate a configured experiment");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--out", out_override, "override the output directory");

    int levels = 3;
    std::string conv_config, conv_out;
    auto* conv = app.add_subcommand("convergence", "halve dx and dt together; report orders");
    conv->add_option("--config", conv_config, "JSON config file")->required();
    conv->add_option("--levels", levels, "number of refinement levels (>= 3)");
    conv->add_option("--out", conv_out, "override the output directory");

    std::string msc_config, msc_out;
    std::vector<std::uint64_t> seeds;
    auto* msc = app.add_subcommand("msc-check", "discrete conservation law on random tangents");
    msc->add_option("--config", msc_config, "JSON config file")->required();
    msc->add_option("--seed", seeds, "two tangent seeds (pass --seed A --seed B)")
        ->expected(2)
        ->required();
    msc->add_option("--out", msc_out, "override the output directory");

    std::string op = "G", medium_spec, adj_out = ".";
    int n = 8;
    auto* adj = app.add_subcommand("adjoint-check", "symmetry defect of a space-time operator");
    adj->add_option("--op", op, "operator kind: G, G1, or G2");
    adj->add_option("--medium", medium_spec, "medium spec, e.g. eps=2+sin(x),mu=1");
    adj->add_option("--n", n, "samples per spatial axis at the coarse level");
    adj->add_option("--out", adj_out, "output directory for the CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return do_run(config_path, out_override);
        if (conv->parsed()) return do_convergence(conv_config, levels, conv_out);
        if (msc->parsed()) return do_msc_check(msc_config, seeds, msc_out);
        return do_adjoint_check(op, medium_spec, n, adj_out);
    } catch (const msmx::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const msmx::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const msmx::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 2;
    }
}
