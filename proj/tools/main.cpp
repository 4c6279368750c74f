#include "foldcont/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Preimages of nonlinear maps by continuation across folds"};
    app.require_subcommand(1);

    struct Args {
        std::string config;
        std::string out;
        bool strict = false;
        std::uint64_t seed = 0;
        unsigned threads = 0;
    };
    Args args;
    const std::pair<const char*, foldcont::Command> commands[] = {
        {"planar", foldcont::Command::planar},
        {"sl-oracle", foldcont::Command::sl_oracle},
        {"sl-diagram", foldcont::Command::sl_diagram},
        {"elliptic", foldcont::Command::elliptic},
    };
    const char* help[] = {
        "critical contours, bifurcation diagrams and multistart on a planar map",
        "all solutions of the piecewise-linear Sturm-Liouville problem by orthant enumeration",
        "bifurcation diagrams of the piecewise-linear problem, verified against the oracle",
        "the semilinear elliptic problem on the annulus",
    };
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < 4; ++i) {
        auto* sub = app.add_subcommand(commands[i].first, help[i]);
        sub->add_option("--config", args.config, "experiment config (INI)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "output directory")->required();
        sub->add_flag("--strict", args.strict, "fail on verification mismatches");
        sub->add_option("--seed", args.seed, "random seed (overrides the config)");
        sub->add_option("--threads", args.threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : foldcont::kExitConfig;
    }

    foldcont::RunOptions opts;
    opts.strict = args.strict;
    for (auto* sub : subs) {
        if (!sub->parsed()) continue;
        if (sub->count("--seed")) opts.seed = args.seed;
        if (sub->count("--threads")) opts.threads = args.threads;
        for (const auto& [name, cmd] : commands)
            if (sub->get_name() == name) return foldcont::run_command(cmd, args.config, args.out, opts, std::cout, std::cerr);
    }
    return foldcont::kExitConfig;
}
