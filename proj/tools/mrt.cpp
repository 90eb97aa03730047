#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "mrt/cli.hpp"
#include "mrt/io.hpp"

int main(int argc, char** argv) {
    mrt::cli::RunConfig cfg;
    CLI::App app{"Multiscale rectifiability toolkit"};
    app.require_subcommand(1);
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("input", cfg.input, "measure file (csv or json)")->required();
        sub->add_option("--format", cfg.format, "csv | json (default: from the extension)");
        sub->add_option("-o,--output", cfg.output, "report path (default: stdout)");
        sub->add_option("-p,--p", cfg.p, "beta exponent")->capture_default_str();
        sub->add_option("--threads", cfg.threads, "worker threads (default: MRT_THREADS, then all cores)");
    };
    CLI::App* beta = app.add_subcommand("beta", "per-cube beta numbers");
    CLI::App* jones = app.add_subcommand("jones", "per-atom Jones functions");
    CLI::App* tst = app.add_subcommand("tst", "beta^2(E) and S** square sums");
    CLI::App* curve = app.add_subcommand("curve", "nets, curve construction and length certificate");
    CLI::App* decompose = app.add_subcommand("decompose", "rectifiable / unrectifiable decomposition estimate");
    CLI::App* validate = app.add_subcommand("validate", "net, tree and ledger validators");
    for (CLI::App* sub : {beta, jones, tst, curve, decompose, validate}) add_common(sub);
    for (CLI::App* sub : {beta, jones, validate}) sub->add_option("-c,--c", cfg.c, "c of the star_c variant")->capture_default_str();
    for (CLI::App* sub : {beta, tst, validate}) {
        sub->add_option("--k-lo", cfg.k_lo, "coarsest scale")->capture_default_str();
        sub->add_option("--k-hi", cfg.k_hi, "finest scale")->capture_default_str();
    }
    for (CLI::App* sub : {jones, decompose}) sub->add_option("--k-max", cfg.k_max, "truncation scale");
    for (CLI::App* sub : {curve, validate}) {
        sub->add_option("--depth", cfg.depth, "number of net levels below r0")->capture_default_str();
        sub->add_option("--cstar", cfg.cstar, "net proximity constant")->capture_default_str();
        sub->add_option("--epsilon", cfg.epsilon, "flatness threshold of the construction")->capture_default_str();
    }
    decompose->add_option("--c-ladder", cfg.c_ladder, "lower regularity constants")->delimiter(',');
    decompose->add_option("--n-ladder", cfg.n_ladder, "Jones caps")->delimiter(',');
    decompose->add_option("--eps-ladder", cfg.eps_ladder, "localization epsilons as fractions of mu(Top)")->delimiter(',');
    decompose->add_option("--epsilon", cfg.epsilon, "flatness threshold of the construction")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();

    mrt::cli::RunResult res = mrt::cli::run(cfg);
    if (cfg.output.empty()) {
        std::cout << res.report;
    }
    if (!cfg.output.empty()) {
        try {
            mrt::save_text(cfg.output, res.report);
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }
    }
    return res.exit_code;
}
