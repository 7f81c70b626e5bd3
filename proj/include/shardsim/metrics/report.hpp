/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shardsim/core/types.hpp"

namespace shardsim::metrics {

  struct SeriesPoint {
    VirtualTime at{0};
    Height tip = 0;
    Height finalized = 0;
    std::string event;  // "finalized" or "rollback"

    bool operator==(const SeriesPoint &) const = default;
  };

  struct StallWindow {
    VirtualTime start{0};
    VirtualTime end{0};

    bool operator==(const StallWindow &) const = default;
  };

  struct AttackSummary {
    uint32_t rounds_executed = 0;
    uint32_t rollbacks_caused = 0;
    uint32_t excluded = 0;
    Height net_height_progress = 0;
    Height max_progress_between_rollbacks = 0;
    Yocto attacker_cost;

    bool operator==(const AttackSummary &) const = default;
  };

  struct MetricsReport {
    std::string scenario;
    std::string protocol;
    uint64_t seed = 0;
    uint32_t shards = 0;
    VirtualTime duration{0};
    VirtualTime t_block{0};
    VirtualTime network_latency{0};
    std::string proof_policy;
    bool formula_1 = false;
    bool formula_2 = false;

    uint64_t submitted_txs = 0;
    uint64_t finalized_txs = 0;
    uint64_t reverted_txs = 0;
    uint64_t excluded_txs = 0;
    uint64_t dropped_txs = 0;
    uint64_t rolled_back_txs = 0;

    Height tip_height = 0;
    Height finalized_height = 0;
    uint64_t blocks_finalized = 0;
    uint64_t rollback_count = 0;
    uint64_t validator_failures = 0;

    /// finalized_txs / duration.
    double tps = 0;
    /// Transactions in blocks after the first finalized one, over the time
    /// from the first to the last finalization.
    double steady_state_tps = 0;
    /// Mean gap between consecutive finalizations, seconds.
    double mean_block_interval = 0;
    /// Submission to finalization, seconds, over finalized transactions.
    double mean_latency = 0;
    double max_latency = 0;

    std::vector<StallWindow> stall_windows;
    std::vector<SeriesPoint> series;
    std::map<std::string, uint64_t> rewards;
    std::vector<std::string> invariant_violations;
    std::optional<AttackSummary> attack;
    Yocto initial_supply;
    Yocto final_supply;

    bool operator==(const MetricsReport &) const = default;
  };

  class ReportError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  /// Times are integer microseconds and amounts decimal yocto strings, so a
  /// report survives a round trip exactly.
  nlohmann::json to_json(const MetricsReport &report);
  /// Throws ReportError naming the offending field.
  MetricsReport report_from_json(const nlohmann::json &j);

  std::string render_json(const MetricsReport &report);
  MetricsReport parse_report(const std::string &text);

  /// time_s,tip,finalized,event
  std::string render_csv(const MetricsReport &report);
  std::string render_summary(const MetricsReport &report);

  /// Finalized and tip height over time, one polyline per report.
  std::string render_height_svg(const std::vector<MetricsReport> &reports);
  /// TPS against shard count, one point per report.
  std::string render_tps_svg(const std::vector<MetricsReport> &reports);

  double seconds(VirtualTime t);

}  // namespace shardsim::metrics
