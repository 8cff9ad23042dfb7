#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esr/cli.hpp"

namespace {

struct Common {
    std::string config;
    std::string out = "out";
    unsigned workers = 0;
    bool svg = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment file (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--workers", c.workers, "worker threads (0: $ESR_WORKERS or all cores)");
    cmd->add_flag("--svg", c.svg, "also write SVG charts");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust expected-shortfall estimation and Monte Carlo experiments"};
    app.require_subcommand(1);

    std::string data_file;
    double alpha = 0.1;
    std::string kind = "plugin";
    esr::estim::Truncated trunc;
    esr::estim::Trimmed trim;
    auto* est = app.add_subcommand("estimate", "estimate ES from a file with one value per line");
    est->add_option("--data", data_file, "input file")->required();
    est->add_option("--alpha", alpha, "tail level in (0, 1/2)");
    est->add_option("--kind", kind, "plugin | truncated | median_of_blocks | trimmed");
    est->add_option("--m", trunc.m, "block size");
    est->add_option("--beta1", trunc.beta1, "lower block quantile level");
    est->add_option("--beta2", trunc.beta2, "upper block quantile level");
    est->add_option("--gap", trunc.gap, "samples skipped between blocks");
    est->add_option("--trim-c", trim.c, "trimming constant");
    est->add_option("--trim-exp", trim.exponent, "trimming exponent");

    std::vector<double> alphas{0.1, 0.05, 0.01};
    std::string table_out = "out";
    auto* table = app.add_subcommand("table1", "Lipschitz constant and sigma_ES for the reference distributions");
    table->add_option("--alpha", alphas, "tail levels")->delimiter(',');
    table->add_option("--out", table_out, "output directory");

    Common curve_opts, hist_opts, demo_opts, mix_opts;
    auto* curve = app.add_subcommand("curve", "deviation probability against sample size");
    add_common(curve, curve_opts);
    auto* hist = app.add_subcommand("hist", "histograms of estimates at one sample size");
    add_common(hist, hist_opts);
    auto* demo = app.add_subcommand("corrupt-demo", "clean against corrupted histograms");
    add_common(demo, demo_opts);
    auto* mixing = app.add_subcommand("mixing", "dependent-data experiment with a long-run variance estimate");
    add_common(mixing, mix_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (est->parsed()) {
            esr::estim::EstimatorConfig cfg;
            if (kind == "plugin") cfg = esr::estim::PlugIn{};
            else if (kind == "truncated") cfg = trunc;
            else if (kind == "median_of_blocks") cfg = esr::estim::MedianOfBlocks{trunc.m, trunc.gap};
            else if (kind == "trimmed") cfg = trim;
            else throw esr::InvalidParameter("kind", "unknown estimator '" + kind + "'");
            const auto data = esr::cli::read_data_file(data_file);
            esr::cli::cmd_estimate(data, alpha, cfg, std::cout, std::cerr);
        } else if (table->parsed()) {
            std::cout << esr::cli::cmd_table1(alphas, table_out);
        } else {
            const auto run = [](const Common& o, auto&& fn) {
                const auto cfg = esr::io::load_run_config(o.config);
                fn(cfg, o.out, o.workers ? o.workers : cfg.workers, o.svg || cfg.svg);
            };
            if (curve->parsed())
                run(curve_opts, [](const auto& c, const auto& out, unsigned w, bool svg) {
                    esr::cli::cmd_curve(c, out, w, svg, std::cout);
                });
            else if (hist->parsed())
                run(hist_opts, [](const auto& c, const auto& out, unsigned w, bool svg) {
                    esr::cli::cmd_hist(c, out, w, svg, std::cout);
                });
            else if (demo->parsed())
                run(demo_opts, [](const auto& c, const auto& out, unsigned w, bool svg) {
                    esr::cli::cmd_corrupt_demo(c, out, w, svg, std::cout);
                });
            else
                run(mix_opts, [](const auto& c, const auto& out, unsigned w, bool) {
                    esr::cli::cmd_mixing(c, out, w, std::cout);
                });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
