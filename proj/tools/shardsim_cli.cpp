/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <iostream>

#include <CLI11.hpp>

#include "shardsim/metrics/cli.hpp"

int main(int argc, char **argv) {
  using namespace shardsim::metrics;
  CLI::App app{"shardsim: baseline vs Synchro sharding simulator"};
  app.require_subcommand(1);

  CliOptions run_opts;
  CliOptions cmp_opts;
  auto add_common = [](CLI::App *cmd, CliOptions &o) {
    cmd->add_option("--scenario", o.scenario, "scenario JSON file")->required();
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "overrides params.seed");
    cmd->add_option("--set", o.overrides, "dotted.path=value override (repeatable)");
  };
  auto *run = app.add_subcommand("run", "run one scenario");
  add_common(run, run_opts);
  run->add_option("--protocol", run_opts.protocol, "synchro or baseline");
  auto *compare = app.add_subcommand("compare", "run baseline and synchro on one workload");
  add_common(compare, cmp_opts);

  std::vector<std::string> files;
  std::string report_out = ".";
  auto *report = app.add_subcommand("report", "summarize and plot report files");
  report->add_option("reports", files, "report.json files");
  report->add_option("--out", report_out, "directory for plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (*run) return cli_run(run_opts, std::cout, std::cerr);
  if (*compare) return cli_compare(cmp_opts, std::cout, std::cerr);
  return cli_report(files, report_out, std::cout, std::cerr);
}
