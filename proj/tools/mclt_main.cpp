// mclt: command-line driver for convergence-rate experiments.
//
//   mclt run   --config <file> --out <dir> [--seed <u64>] [--workers <k>]
//   mclt check --config <file>
//
// Exit status: 0 when every explicit-constant check and completion audit
// passes (or, for `check`, when the config is valid); 1 when a check fails;
// 2 on usage, parse or I/O errors.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mclt/mclt.h"

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitError = 2;

struct ConfigDeleter {
  void operator()(mclt_config* c) const { mclt_config_free(c); }
};
struct ReportDeleter {
  void operator()(mclt_report* r) const { mclt_report_free(r); }
};
using ConfigPtr = std::unique_ptr<mclt_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<mclt_report, ReportDeleter>;

int fail(const char* what, mclt_status st) {
  std::fprintf(stderr, "mclt: %s: %s (%s)\n", what, mclt_last_error(), mclt_status_name(st));
  return kExitError;
}

std::optional<ConfigPtr> load(const std::string& path, int& rc) {
  mclt_config* raw = nullptr;
  if (const auto st = mclt_config_load(path.c_str(), &raw); st != MCLT_OK) {
    rc = fail("config", st);
    return std::nullopt;
  }
  return ConfigPtr(raw);
}

int run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
        std::optional<unsigned> workers) {
  int rc = 0;
  auto cfg = load(config_path, rc);
  if (!cfg) return rc;
  if (seed) mclt_config_set_seed(cfg->get(), *seed);
  if (workers) {
    if (const auto st = mclt_config_set_workers(cfg->get(), *workers); st != MCLT_OK)
      return fail("workers", st);
  }

  mclt_report* raw = nullptr;
  if (const auto st = mclt_run(cfg->get(), &raw); st != MCLT_OK) return fail("run", st);
  ReportPtr report(raw);

  std::string dir = out_dir.empty() ? mclt_config_out_dir(cfg->get()) : out_dir;
  if (dir.empty()) {
    std::fprintf(stderr, "mclt: no output directory (use --out or out_dir in the config)\n");
    return kExitError;
  }
  if (const auto st = mclt_report_write(report.get(), dir.c_str()); st != MCLT_OK)
    return fail("write", st);

  std::size_t failed = 0;
  for (std::size_t i = 0; i < mclt_report_check_count(report.get()); ++i) {
    const char *name = nullptr, *family = nullptr, *kind = nullptr;
    int pass = 0;
    mclt_report_check(report.get(), i, &name, &family, &kind, &pass);
    if (!pass) {
      ++failed;
      std::fprintf(stderr, "FAIL %-32s %-28s [%s]\n", name, family, kind);
    }
  }
  const bool ok = mclt_report_all_pass(report.get()) != 0;
  std::printf("%zu rows, %zu checks (%zu failed) -> %s\n", mclt_report_row_count(report.get()),
              mclt_report_check_count(report.get()), failed, dir.c_str());
  return ok ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Martingale CLT convergence-rate laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  auto* run_cmd = app.add_subcommand("run", "Run the experiment grid and write results");
  run_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory (overrides out_dir in the config)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Master seed (overrides master_seed)");
  auto* workers_opt =
      run_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* check_cmd = app.add_subcommand("check", "Validate a config file without running it");
  check_cmd->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  if (*run_cmd) {
    return run(config_path, out_dir, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt,
               *workers_opt ? std::optional<unsigned>(workers) : std::nullopt);
  }
  int rc = 0;
  if (!load(config_path, rc)) return rc;
  std::printf("%s: ok\n", config_path.c_str());
  return 0;
}
