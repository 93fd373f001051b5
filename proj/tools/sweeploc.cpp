// SPDX-License-Identifier: Apache-2.0
//
// sweeploc — beam-sweep RSS localization simulator.
//
//   sweeploc <subcommand> --config <path> --out <path> [--seed <u64>] [--n <int>]
//
// Subcommands: rss-map, crlb-map, nlse-map, sweep-n, cdf, calibrate.
// Flags override the corresponding config keys. The worker count comes
// from SWEEPLOC_THREADS (default: all available cores).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sweeploc/subcommands.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

int env_workers() {
    const char* value = std::getenv("SWEEPLOC_THREADS");
    if (!value || !*value) return 0; // 0 = all available cores
    const int workers = std::atoi(value);
    return workers > 0 ? workers : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beam-sweep RSS localization simulator: accuracy-bound and "
                 "estimator-performance maps for a linear mmWave array"};
    app.require_subcommand(1);

    struct SubArgs {
        std::string config_path;
        std::string out_path;
        std::optional<std::uint64_t> seed;
        std::optional<int> n;
    };

    const std::map<std::string, std::string> descriptions = {
        {"rss-map", "best achievable RSS per grid cell"},
        {"crlb-map", "position error bound per grid cell"},
        {"nlse-map", "Monte-Carlo estimator RMSE per grid cell"},
        {"sweep-n", "summary metrics versus element count"},
        {"cdf", "empirical error CDFs versus element count"},
        {"calibrate", "fit the noise sigma to reference bound medians"},
    };

    std::vector<std::pair<CLI::App*, std::shared_ptr<SubArgs>>> subs;
    for (const std::string& name : sweeploc::subcommand_names()) {
        auto args = std::make_shared<SubArgs>();
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--config", args->config_path, "key = value config file");
        sub->add_option("--out", args->out_path, "output CSV path")->required();
        sub->add_option("--seed", args->seed, "override master_seed");
        sub->add_option("--n", args->n, "override the element count (and n_list)");
        subs.emplace_back(sub, args);
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [sub, args] : subs) {
        if (!sub->parsed()) continue;
        sweeploc::SimulationConfig cfg;
        try {
            if (!args->config_path.empty())
                cfg = sweeploc::parse_simulation_config(read_file(args->config_path));
            if (args->seed) cfg.master_seed = *args->seed;
            if (args->n) {
                cfg.array.n_elements = *args->n;
                cfg.n_list = {*args->n};
            }
            validate(cfg);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "sweeploc %s: %s\n", sub->get_name().c_str(), e.what());
            return sweeploc::kExitConfig;
        }
        return sweeploc::run_subcommand(sub->get_name(), cfg, args->out_path,
                                        env_workers());
    }
    return sweeploc::kExitUsage;
}
