// helmdual: dual-variational solver for -Δu - u = Q|u|^{p-2}u on a periodic box.
//
//   helmdual solve    [--config FILE] [--out DIR] [--seed K]
//   helmdual compare  ...
//   helmdual farfield ...
//   helmdual selftest ...

#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>

#include "helmdual/error.hpp"
#include "helmdual/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dual-variational nonlinear Helmholtz solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  for (const char* mode : {"solve", "compare", "farfield", "selftest"}) {
    auto* sub = app.add_subcommand(mode);
    sub->add_option("--config", config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides 'output')");
    sub->add_option("--seed", seed, "random seed (overrides 'seed')");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // Options after the failing one were not parsed; find --out by hand.
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string_view(argv[i]) == "--out") out_dir = argv[i + 1];
    helmdual::write_error_record(out_dir.empty() ? "out" : out_dir, "UsageError", e.what());
    app.exit(e);
    return 2;
  }
  const std::string mode = app.get_subcommands().front()->get_name();

  helmdual::RunConfig cfg;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    cfg = helmdual::parse_config(text, mode);
  } catch (const helmdual::Error& e) {
    helmdual::write_error_record(out_dir.empty() ? "out" : out_dir, std::string(helmdual::to_string(e.kind())),
                                 e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!out_dir.empty()) cfg.output = out_dir;
  if (seed) cfg.seed = *seed;
  return helmdual::run_experiment(cfg, std::cout);
}
