// sqec command-line driver: config-in, files-out wrappers around the
// experiment runners.  Exit codes: 0 success, 2 configuration/validation
// failure, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sqec/sweep.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

struct SubArgs {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::string method;
};

void add_common_flags(CLI::App* sub, SubArgs& a, bool with_method) {
  sub->add_option("--config", a.config_path, "JSON configuration file")->required();
  sub->add_option("--out", a.out, "output path (CSV/JSON file, or prefix for dephasing)");
  sub->add_option("--seed", a.seed, "master seed override")
      ->each([&a](const std::string&) { a.seed_set = true; });
  sub->add_option("--threads", a.threads, "worker thread count override");
  if (with_method)
    sub->add_option("--method", a.method, "spectral, timedomain or both");
}

int run(const std::string& name, const SubArgs& a) {
  std::ifstream in(a.config_path);
  if (!in) {
    std::cerr << "error: cannot read config file: " << a.config_path << "\n";
    return 2;
  }
  sqec::json cfg = sqec::json::parse(in);

  sqec::CliOverrides o;
  if (!a.out.empty()) o.out = a.out;
  if (a.seed_set) o.seed = a.seed;
  if (a.threads > 0) o.threads = a.threads;
  if (!a.method.empty()) o.method = a.method;

  auto files = sqec::run_experiment(name, cfg, o);
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  openblas_set_num_threads(1);

  CLI::App app{"Passively error-corrected two-transmon logical qubit: "
               "lifetime sweeps, dephasing ensembles, rate predictions, "
               "transmon spectra and drive planning"};
  app.require_subcommand(1);

  SubArgs args;
  std::string picked;
  for (auto [name, desc, with_method] :
       {std::tuple{"lifetimes", "Logical lifetime sweep over T1P (CSV)", true},
        std::tuple{"dephasing", "1/f or telegraph dephasing ensembles (CSV+JSON)", false},
        std::tuple{"rates", "Closed-form rate and lifetime predictions (JSON)", false},
        std::tuple{"plan", "Two-tone drive plan with collision table (JSON)", false},
        std::tuple{"transmon", "Transmon spectrum and matrix elements (JSON)", false}}) {
    CLI::App* sub = app.add_subcommand(name, desc);
    add_common_flags(sub, args, with_method);
    sub->callback([&picked, n = std::string(name)] { picked = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return run(picked, args);
  } catch (const sqec::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}
