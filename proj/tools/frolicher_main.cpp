#include <CLI11.hpp>
#include <string>
#include <thread>

#include "frolicher/cli.hpp"

using frolicher::cli::RunConfig;

int main(int argc, char** argv) {
    CLI::App app{"Finite-model computations for the Froelicher spectral sequence, "
                 "d_h-cohomology and E_r-sG metrics"};
    app.require_subcommand(1);

    RunConfig config;
    config.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    std::string h_grid_text, t_grid_text, format_text = "human";
    int k_flag = -1, r_flag = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--model", config.model, "catalog model name");
        cmd->add_option("--file", config.file, "structure-equation file");
        cmd->add_option("--k", k_flag, "total degree");
        cmd->add_option("--r", r_flag, "page index");
        cmd->add_option("--h-grid", h_grid_text, "comma-separated complex h values");
        cmd->add_option("--t-grid", t_grid_text, "comma-separated complex t values");
        cmd->add_option("--seed", config.seed, "seed for sampled suites");
        cmd->add_option("--tol-rank", config.tol_rank, "relative rank threshold");
        cmd->add_option("--tol-zero", config.tol_zero, "identity residual tolerance");
        cmd->add_option("--format", format_text, "human | csv | json");
        cmd->add_option("--out", config.out, "output path (default stdout)");
        cmd->add_option("--jobs", config.jobs, "parallel grid evaluation");
    };

    for (const char* name : {"validate", "pages", "dh", "favb", "tower", "sg", "family"}) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common(cmd);
        if (std::string(name) == "family")
            cmd->add_flag("--sg", config.sg_mode, "run the sG transport scan");
    }

    CLI11_PARSE(app, argc, argv);

    config.command = app.get_subcommands().front()->get_name();
    if (k_flag >= 0) config.k = k_flag;
    if (r_flag >= 0) config.r = r_flag;
    try {
        if (!h_grid_text.empty()) config.h_grid = frolicher::cli::parse_grid(h_grid_text);
        if (!t_grid_text.empty()) config.t_grid = frolicher::cli::parse_grid(t_grid_text);
        if (format_text == "human")
            config.format = frolicher::cli::Format::Human;
        else if (format_text == "csv")
            config.format = frolicher::cli::Format::Csv;
        else if (format_text == "json")
            config.format = frolicher::cli::Format::Json;
        else
            throw frolicher::DomainError("unknown format '" + format_text + "'");
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    return frolicher::cli::run_and_write(config);
}
