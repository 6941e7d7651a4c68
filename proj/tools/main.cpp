#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sfdlab/config.hpp"
#include "sfdlab/errors.hpp"
#include "sfdlab/harness.hpp"
#include "sfdlab/integrator.hpp"
#include "sfdlab/report.hpp"

namespace {

struct GlobalFlags {
    std::string config_path;
    long long seed = -1; // < 0 means: use the config's seeds
    int threads = 1;
    std::string out_dir;
    std::string format;
};

sfdlab::ExperimentConfig load_cfg(const GlobalFlags& gf) {
    if (gf.config_path.empty())
        throw sfdlab::ValidationError("this subcommand needs --config PATH");
    sfdlab::ExperimentConfig cfg = sfdlab::load_config_file(gf.config_path);
    if (gf.seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(gf.seed)};
    if (!gf.out_dir.empty()) cfg.out_dir = gf.out_dir;
    if (!gf.format.empty()) cfg.format = gf.format;
    return cfg;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir.empty() ? "." : dir);
    std::filesystem::path p = std::filesystem::path(dir.empty() ? "." : dir) / name;
    std::ofstream os(p);
    if (!os) throw sfdlab::ValidationError("cannot write " + p.string());
    std::cout << "writing " << p.string() << '\n';
    return os;
}

void emit(const sfdlab::ConvergenceReport& rep, const sfdlab::ExperimentConfig& cfg) {
    std::string name = cfg.format == "json" ? "report.json" : "report.csv";
    std::ofstream os = open_out(cfg.out_dir, name);
    if (cfg.format == "json")
        sfdlab::write_report_json(rep, os);
    else
        sfdlab::write_report_csv(rep, os);
    sfdlab::write_report_summary(rep, std::cout);
}

int run(int argc, char** argv) {
    CLI::App app{"laboratory for spatial difference schemes driven by Wiener noise"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalFlags gf;
    app.add_option("--config", gf.config_path, "experiment description file");
    app.add_option("--seed", gf.seed, "override the seed list with this single seed");
    app.add_option("--threads", gf.threads, "workers for the (level, seed) queue")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", gf.out_dir, "directory for report and trajectory files");
    app.add_option("--format", gf.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* cmd_check =
        app.add_subcommand("check", "consistency and parabolicity of the configured scheme");
    CLI::App* cmd_solve =
        app.add_subcommand("solve", "single pathwise run at the coarsest level");
    CLI::App* cmd_converge = app.add_subcommand("converge", "ladder convergence study");
    CLI::App* cmd_extrapolate =
        app.add_subcommand("extrapolate", "ladder study with Richardson combination");
    CLI::App* cmd_expansion =
        app.add_subcommand("expansion-verify", "residual orders of the operator expansions");
    CLI::App* cmd_example = app.add_subcommand(
        "reproduce-example-2-4", "worked benchmark table on the pinned path");
    int expansion_max_n = 2;
    cmd_expansion->add_option("--max-order", expansion_max_n,
                              "highest expansion order to verify");

    CLI11_PARSE(app, argc, argv);

    if (cmd_check->parsed()) {
        sfdlab::ExperimentConfig cfg = load_cfg(gf);
        sfdlab::CheckReport rep = sfdlab::run_check(cfg);
        std::printf("consistency residual: %.3e\n", rep.residual);
        std::printf("parabolicity min eigenvalue: %.6e\n", rep.parabolicity.min_eigenvalue);
        std::printf("smallest one-sided weight: %.6e\n", rep.parabolicity.min_pq);
        std::printf("verdict: %s\n", rep.pass ? "PASS" : "FAIL");
        return rep.pass ? 0 : 2;
    }
    if (cmd_solve->parsed()) {
        sfdlab::ExperimentConfig cfg = load_cfg(gf);
        sfdlab::Trajectory traj = sfdlab::run_single(cfg);
        std::ofstream os = open_out(cfg.out_dir, "trajectory.csv");
        sfdlab::write_trajectory_csv(traj, os);
        return 0;
    }
    if (cmd_converge->parsed() || cmd_extrapolate->parsed()) {
        sfdlab::ExperimentConfig cfg = load_cfg(gf);
        if (cmd_extrapolate->parsed()) cfg.extrapolate = true;
        sfdlab::ConvergenceReport rep =
            sfdlab::run_convergence(cfg, sfdlab::RunOptions{gf.threads});
        emit(rep, cfg);
        return 0;
    }
    if (cmd_expansion->parsed()) {
        sfdlab::ExperimentConfig cfg = load_cfg(gf);
        sfdlab::ExpansionVerifyReport rep = sfdlab::run_expansion_verify(cfg, expansion_max_n);
        auto fit_text = [](const sfdlab::OrderFit& f) {
            if (f.exact) return std::string("exact");
            if (!f.fitted) return std::string("(no fit)");
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", f.slope);
            return std::string(buf);
        };
        for (std::size_t i = 0; i < rep.orders.size(); ++i)
            std::printf("n = %d: drift residual order %s, diffusion residual order %s\n",
                        rep.orders[i], fit_text(rep.l_fits[i]).c_str(),
                        fit_text(rep.m_fits[i]).c_str());
        return 0;
    }
    if (cmd_example->parsed()) {
        std::vector<sfdlab::WorkedExampleRow> rows = sfdlab::reproduce_example_2_4();
        std::printf("%-28s %16s %16s %12s\n", "quantity", "computed", "printed", "|diff|");
        for (const sfdlab::WorkedExampleRow& r : rows)
            std::printf("%-28s %16.10f %16.10f %12.3e\n", r.label.c_str(), r.computed,
                        r.printed, r.abs_diff);
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sfdlab::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const sfdlab::SolverAbort& e) {
        std::cerr << "solver abort: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
