// Command-line front end: run presets or config files, list presets,
// validate config files.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include "d2dcache.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace d2dcache;

int run_command(const std::string& target, std::optional<std::uint64_t> seed,
                std::optional<std::size_t> iterations, std::optional<unsigned> threads,
                const std::string& out_path, const std::string& format_name)
{
    auto preset = experiments::resolve_preset(target);
    if (seed)
        preset.seed = *seed;
    if (iterations)
        preset.iterations = *iterations;
    if (threads)
        preset.threads = *threads;
    experiments::validate(preset);
    const auto format =
        format_name == "json" ? experiments::OutputFormat::json : experiments::OutputFormat::csv;
    const auto rows = experiments::run_preset(preset, &std::cerr);
    if (out_path.empty())
        experiments::emit_results(rows, format, std::cout);
    else
        experiments::emit_results(rows, format, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Service success probability of cached D2D networks with mobile transmitters"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a preset or a config file and emit result rows");
    std::string target;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> iterations;
    std::optional<unsigned> threads;
    std::string out_path;
    std::string format = "csv";
    run->add_option("target", target, "Preset name or config file path")->required();
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--iterations", iterations, "Monte Carlo iterations per sweep point")
        ->check(CLI::PositiveNumber);
    run->add_option("--threads", threads, "Worker threads for the simulator")
        ->check(CLI::PositiveNumber);
    run->add_option("--out", out_path, "Output file (default: stdout)");
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    auto* list = app.add_subcommand("list-presets", "List the built-in presets");

    auto* check = app.add_subcommand("validate", "Parse and validate a config file");
    std::string config_path;
    check->add_option("config", config_path, "Config file path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run)
            return run_command(target, seed, iterations, threads, out_path, format);
        if (*list) {
            for (const auto& [kind, name] : experiments::kPresetNames)
                std::cout << name << '\n';
            return 0;
        }
        if (*check) {
            const auto preset = experiments::load_config(config_path);
            std::cout << config_path << ": ok (preset " << experiments::to_string(preset.kind) << ")\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
