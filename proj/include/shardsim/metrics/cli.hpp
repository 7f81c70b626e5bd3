/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shardsim::metrics {

  inline constexpr int kExitOk = 0;
  inline constexpr int kExitViolation = 1;
  inline constexpr int kExitConfig = 2;

  struct CliOptions {
    std::string scenario;
    std::string out = "out";
    std::optional<uint64_t> seed;
    std::optional<std::string> protocol;
    /// "dotted.path=value", applied after the file and SHARDSIM_SEED.
    std::vector<std::string> overrides;
  };

  /// Writes report.json, series.csv and height.svg into opts.out and prints a
  /// one-line summary.
  int cli_run(const CliOptions &opts, std::ostream &out, std::ostream &err);

  /// Runs the scenario under both protocols with the same seed. Writes
  /// <out>/baseline/, <out>/synchro/, compare.json and compare.txt.
  int cli_compare(const CliOptions &opts, std::ostream &out, std::ostream &err);

  /// Prints the summary of each report and writes height.svg and
  /// tps_vs_shards.svg into `out_dir`.
  int cli_report(const std::vector<std::string> &files, const std::string &out_dir,
                 std::ostream &out, std::ostream &err);

}  // namespace shardsim::metrics
