// cantorlab: run experiment configs, verify the desk-scale checks, export reports.
//
//   cantorlab run <config>
//   cantorlab verify <suite>          (example, lemma38, discrepancy, psi, main, transform, phi, moran, all)
//   cantorlab export <run-id> --format csv|json
//
// Exit status: 0 ok, 1 verification failure, 2 config or usage error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cantor/experiment/checks.hpp"
#include "cantor/experiment/config.hpp"
#include "cantor/experiment/run.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;

int do_run(const std::string& path) {
  using namespace cantor::experiment;
  const auto cfg = load_config(path);
  RunOptions opt;
  opt.cache_root = default_cache_root();
  const auto res = run(cfg, opt);
  std::cout << "run " << res.run_id << " -> " << res.dir.string() << "\n";
  for (const auto& r : res.records) {
    if (r.series.empty()) continue;
    const auto& last = r.series.back();
    std::cout << "  " << r.statistic << " @ n=" << last.n << ": "
              << detail::show(cantor::make_rational(last.num, last.den)) << "\n";
  }
  return kOk;
}

int do_verify(const std::string& suite) {
  using namespace cantor::experiment;
  CheckContext ctx;
  ctx.cache_root = default_cache_root();
  bool ok = true;
  for (const auto& r : run_suite(suite, ctx)) {
    std::cout << r.summary_line() << "\n";
    for (const auto& m : r.items) {
      std::cout << "    " << (m.pass ? "ok   " : "FAIL ") << m.label << ": observed " << m.observed << ", threshold "
                << m.threshold << "\n";
    }
    for (const auto& n : r.notes) std::cout << "    note: " << n << "\n";
    ok = ok && r.pass();
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cantor series expansion experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Execute an experiment config");
  run_cmd->add_option("config", config_path, "Config file (key = value lines)")->required();

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "Run an acceptance suite and report thresholds");
  verify_cmd->add_option("suite", suite, "Suite name or 'all'")
      ->required()
      ->check(CLI::IsMember([] {
        auto names = cantor::experiment::suite_names();
        names.push_back("all");
        return names;
      }()));

  std::string run_id, format = "csv";
  auto* export_cmd = app.add_subcommand("export", "Re-serialize a finished run's records");
  export_cmd->add_option("run-id", run_id, "Run directory name under the cache root")->required();
  export_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return do_run(config_path);
    if (*verify_cmd) return do_verify(suite);
    if (*export_cmd) {
      std::cout << cantor::experiment::export_run(run_id, format).string() << "\n";
      return kOk;
    }
  } catch (const cantor::Error& e) {
    std::cerr << "cantorlab: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "cantorlab: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
