#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdcont/experiments.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON experiment config")
        ->required();
    cmd->add_option("--set", args.overrides,
                    "Override a config field, e.g. --set model.gamma=3.61");
    cmd->add_option("--out", args.out_dir, "Output directory override");
    cmd->add_option("--seed", args.seed, "Seed for stochastic perturbations")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

int run(const CommonArgs& args, const std::string& expected_kind) {
    std::ifstream in(args.config_path);
    if (!in) {
        std::cerr << "error: cannot read config file " << args.config_path
                  << '\n';
        return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    try {
        text = rdcont::apply_override(text,
                                      "experiment=\"" + expected_kind + "\"");
        for (const std::string& assignment : args.overrides)
            text = rdcont::apply_override(text, assignment);
        if (!args.out_dir.empty())
            text = rdcont::apply_override(text,
                                          "output_dir=\"" + args.out_dir +
                                              "\"");
        if (args.seed_set)
            text = rdcont::apply_override(
                text, "seed=" + std::to_string(args.seed));
        const rdcont::ExperimentConfig config =
            rdcont::ExperimentConfig::from_json_text(text);
        return rdcont::run_experiment(config);
    } catch (const rdcont::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Continuation toolkit for heterogeneous 1D reaction-diffusion "
        "systems"};
    app.require_subcommand(1);

    const std::vector<std::string> kinds = {
        "bifurcation", "fold-scan",  "critical-length",
        "turing-region", "dispersion", "simulate"};
    std::vector<CommonArgs> args(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i)
        add_common(app.add_subcommand(kinds[i]), args[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    for (std::size_t i = 0; i < kinds.size(); ++i)
        if (app.get_subcommand(kinds[i])->parsed()) return run(args[i], kinds[i]);
    return 1;
}
