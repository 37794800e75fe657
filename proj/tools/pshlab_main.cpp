#include <CLI11.hpp>

#include <iostream>

#include "../src/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pshlab: a numerical laboratory for maximal plurisubharmonic functions"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 0;
    bool json = false;

    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (report.json, scan.csv, density.csv)");
    run->add_option("--seed", seed, "seed for randomized suites");
    run->add_option("--threads", threads, "worker threads (0 = hardware)");
    run->add_flag("--json", json, "print the full report as JSON");

    auto* list = app.add_subcommand("list", "list catalog specs, schemes and chi families");
    list->add_flag("--json", json, "machine-readable listing");

    auto* version = app.add_subcommand("version", "print version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto cfg = pshlab::ExperimentConfig::parse_file(config_path);
            const auto outcome = pshlab::run_experiment(cfg, out_dir, seed, threads);
            if (json)
                std::cout << outcome.report.dump(2) << "\n";
            else
                std::cout << outcome.summary << "\n"
                          << "outputs written to " << out_dir << " (config "
                          << outcome.report["config_hash"].get<std::string>() << ")\n";
        } else if (list->parsed()) {
            pshlab::print_catalog(std::cout, json);
        } else if (version->parsed()) {
            std::cout << "pshlab " << pshlab::kVersion << "\n";
        }
    } catch (const pshlab::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const pshlab::ResourceLimitError& e) {
        std::cerr << "resource ceiling: " << e.what() << "\n";
        return 4;
    } catch (const pshlab::PreconditionError& e) {
        std::cerr << "precondition refused: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
