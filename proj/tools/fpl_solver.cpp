// Batch front end: run, precompute and resume.
#include <iostream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fpl/solver.hpp"
#include "fpl/time_integrator.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fokker-Planck-Landau LDG solver"};
  app.require_subcommand(1);

  std::string output_dir;
  int threads = 0;
  app.add_option("--output-dir", output_dir, "Override output_dir from the config");
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);

  std::string config_path, checkpoint_path;
  auto* run = app.add_subcommand("run", "Run a simulation");
  run->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  auto* pre = app.add_subcommand("precompute", "Build the convolution table cache");
  pre->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  auto* resume = app.add_subcommand("resume", "Continue from a checkpoint");
  resume->add_option("checkpoint", checkpoint_path)->required()->check(CLI::ExistingFile);
  resume->add_option("config", config_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    fpl::RunConfig cfg = fpl::load_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;

    auto progress = [](const fpl::MomentRecord& r, std::uint64_t step) {
      std::cout << "step " << step << "  t = " << r.t << "  mass = " << r.mass << "  entropy = " << r.entropy
                << '\n';
    };
    if (*pre) {
      fpl::precompute(cfg, &std::cout);
    } else if (*run) {
      fpl::run(cfg, std::nullopt, &std::cout, progress);
    } else {
      fpl::run(cfg, fpl::read_checkpoint(checkpoint_path), &std::cout, progress);
    }
  } catch (const fpl::BlowUpError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
