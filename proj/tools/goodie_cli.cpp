#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "goodie/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Hybrid label/feature propagation experiments on graphs with missing features"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a sweep from a config file with optional overrides");
    std::string config_path, method_ovr, scenario_ovr, mr_ovr, seed_ovr, out_ovr, format_ovr;
    run->add_option("--config", config_path, "flat key = value config file");
    run->add_option("--method", method_ovr, "override methods (comma separated)");
    run->add_option("--scenario", scenario_ovr, "override scenario: uniform | structural");
    run->add_option("--mr", mr_ovr, "override missing-rate grid (comma separated)");
    run->add_option("--seed", seed_ovr, "override seeds (comma separated)");
    run->add_option("--out", out_ovr, "override output path");
    run->add_option("--format", format_ovr, "override output format: csv | json");

    CLI11_PARSE(app, argc, argv);

    try {
        goodie::ExperimentConfig cfg;
        std::map<std::string, std::string> kv;
        if (!config_path.empty()) kv = goodie::parse_kv_config(config_path);
        if (!method_ovr.empty()) kv["methods"] = method_ovr;
        if (!scenario_ovr.empty()) kv["scenario"] = scenario_ovr;
        if (!mr_ovr.empty()) kv["mr"] = mr_ovr;
        if (!seed_ovr.empty()) kv["seeds"] = seed_ovr;
        if (!out_ovr.empty()) kv["out"] = out_ovr;
        if (!format_ovr.empty()) kv["format"] = format_ovr;
        goodie::apply_config(kv, cfg);

        auto rows = goodie::sweep(cfg);
        goodie::emit_results(rows, cfg.out_path, cfg.format);
        std::cout << "wrote " << rows.size() << " rows to " << cfg.out_path << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
