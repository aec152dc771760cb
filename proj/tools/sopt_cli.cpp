#include <cstdint>
#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "sopt/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Experiment runner for the sampler, optimizer and game environments"};
    app.require_subcommand(1);
    double scale = 1.0;
    app.add_option("--scale", scale, "Divide iteration counts, generations, night counts and test-set sizes by F")
        ->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "Run an experiment config");
    std::string config, out_root;
    run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out-root", out_root, "Output root (SOPT_OUT_ROOT takes precedence)");

    auto* gen = app.add_subcommand("gen-data", "Write the synthetic 3-class particle dataset");
    std::uint64_t seed = 7;
    std::string out;
    double radius = 2.0, sigma = 1.2;
    gen->add_option("--seed", seed, "Seed")->required();
    gen->add_option("--out", out, "Output CSV")->required();
    gen->add_option("--radius", radius, "Distance of class centers from the origin");
    gen->add_option("--sigma", sigma, "Per-coordinate noise sd");

    auto* plot = app.add_subcommand("plot-data", "Emit plot-ready data from a result file");
    std::string kind, in, plot_out;
    plot->add_option("--kind", kind, "roi-hist | bet-hist | sigma2-hist | response-curve")->required();
    plot->add_option("--in", in, "Input file")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "Output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            sopt::harness::RunOptions opt;
            opt.scale = scale;
            opt.out_root = out_root;
            std::cout << sopt::harness::run_experiment(config, opt) << '\n';
        } else if (*gen) {
            const auto ds = sopt::harness::generate_particle_data(seed, radius, sigma);
            sopt::harness::write_particle_csv(out, ds);
        } else if (*plot) {
            sopt::harness::emit_plot_data(kind, in, plot_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
