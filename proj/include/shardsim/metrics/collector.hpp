/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <unordered_map>

#include "shardsim/metrics/report.hpp"
#include "shardsim/sim/protocol.hpp"

namespace shardsim::metrics {

  /// Observes one protocol run and turns it into a MetricsReport.
  class MetricsCollector : public sim::ProtocolObserver {
   public:
    explicit MetricsCollector(VirtualTime t_block) : t_block_(t_block) {}

    void on_submit(VirtualTime now, const Digest &tx);

    void on_block_appended(VirtualTime now, Height tip, Height finalized) override;
    void on_block_finalized(VirtualTime now, Height height, const Digest &hash,
                            size_t tx_count) override;
    void on_rollback(VirtualTime now, const sim::RollbackEvent &event) override;
    void on_tx_resolved(VirtualTime now, const Digest &tx, sim::TxResolution resolution,
                        Height height) override;
    void on_invariant_violation(VirtualTime now, const std::string &what) override;

    /// Fills the counters, rates, series and stall windows of `report`
    /// (run metadata is left to the caller) for a run that ended at `end`.
    void finish(MetricsReport &report, VirtualTime end) const;

   private:
    struct Finalization {
      VirtualTime at;
      size_t tx_count;
    };

    VirtualTime t_block_;
    Height tip_ = 0;
    Height finalized_ = 0;
    std::vector<Finalization> finalizations_;
    std::vector<VirtualTime> progress_;  // when the finalized height rose
    std::vector<SeriesPoint> series_;
    std::unordered_map<Digest, VirtualTime, DigestHash> pending_;
    uint64_t submitted_ = 0;
    uint64_t counts_[5] = {0, 0, 0, 0, 0};
    int64_t latency_sum_us_ = 0;
    int64_t latency_max_us_ = 0;
    uint64_t latency_n_ = 0;
    uint64_t rollbacks_ = 0;
    std::vector<std::string> violations_;
  };

}  // namespace shardsim::metrics
