#include <chrono>
#include <iomanip>
#include <iostream>
#include <mutex>

#include <CLI11.hpp>

#include "lklab/experiments.hpp"
#include "lklab/parallel.hpp"
#include "lklab/types.hpp"

namespace ex = lklab::experiments;

namespace {

void print_result(const ex::RunResult& r) {
  std::cout << std::setprecision(10);
  for (const auto& c : r.comparisons)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": estimate " << c.estimate << ", target " << c.target
              << ", tolerance " << c.tolerance << "\n";
  std::cout << r.experiment << ": " << (r.pass() ? "pass" : "fail") << "\n";
}

// Progress goes to stderr only, at most a few times per second.
ex::Progress make_progress(bool quiet) {
  if (quiet) return {};
  auto mu = std::make_shared<std::mutex>();
  auto last = std::make_shared<std::chrono::steady_clock::time_point>();
  return [mu, last](const std::string& stage, std::size_t done, std::size_t total) {
    std::lock_guard<std::mutex> lock(*mu);
    auto now = std::chrono::steady_clock::now();
    if (total > 0 && done < total && now - *last < std::chrono::milliseconds(500)) return;
    *last = now;
    if (total > 0)
      std::cerr << "[" << stage << "] " << done << "/" << total << "\n";
    else
      std::cerr << "[" << stage << "]\n";
  };
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    int code = ex::exit_code_for(e);
    std::cerr << "error (exit " << code << "): " << e.what() << "\n";
    return code;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic linking laboratory: average linking numbers, Hopf-type integrals and their identities"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 pass, 1 comparison failed, 2 config/schema error, 3 too many degenerate samples,\n"
      "4 quadrature did not converge, 5 integration step underflow, 6 other error.\n"
      "LKLAB_WORKERS overrides the worker count when the config leaves workers at 0.");

  std::string config_path, out_dir;
  int workers = -1;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");
  run->add_option("--workers", workers, "worker threads (overrides the config)")->check(CLI::NonNegativeNumber);
  run->add_flag("-q,--quiet", quiet, "no progress on stderr");

  auto* self = app.add_subcommand("selftest", "Quick checks of the exact machinery (Hodge identities, pointwise identities)");
  auto* list = app.add_subcommand("list-experiments", "List experiments and their parameters");
  auto* schema = app.add_subcommand("schema", "Print the config schema reference as JSON");

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& e : ex::registry()) {
      std::cout << e.name << "\n  " << e.summary << "\n";
      for (const auto& p : e.params) std::cout << "    " << p.name << " = " << p.default_value.dump() << "  " << p.help << "\n";
    }
    return 0;
  }
  if (*schema) {
    std::cout << ex::schema_reference().dump(2) << "\n";
    return 0;
  }
  if (*self) {
    return guarded([&] {
      bool ok = true;
      for (const char* name : {"hodge-selftest", "identity-suite"}) {
        nlohmann::json j = {{"schema_version", ex::kSchemaVersion}, {"experiment", name}};
        if (std::string(name) == "identity-suite") j["params"] = {{"points", 200}};
        ex::Config cfg = ex::parse_config(j);
        auto r = ex::run(cfg, make_progress(true));
        print_result(r);
        ok = ok && r.pass();
      }
      return ok ? ex::kPass : ex::kFail;
    });
  }
  return guarded([&] {
    ex::Config cfg = ex::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers >= 0) cfg.workers = workers;
    if (!quiet)
      std::cerr << "experiment " << cfg.experiment << ", seed " << cfg.seed << ", workers "
                << (cfg.workers > 0 ? cfg.workers : lklab::worker_count()) << "\n";
    auto r = ex::run(cfg, make_progress(quiet));
    print_result(r);
    for (const auto& f : ex::write_artifacts(r, cfg)) std::cout << "wrote " << f << "\n";
    return r.pass() ? ex::kPass : ex::kFail;
  });
}
