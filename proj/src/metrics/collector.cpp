/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/metrics/collector.hpp"

namespace shardsim::metrics {

  using sim::TxResolution;

  void MetricsCollector::on_submit(VirtualTime now, const Digest &tx) {
    ++submitted_;
    pending_.try_emplace(tx, now);
  }

  void MetricsCollector::on_block_appended(VirtualTime now, Height tip, Height finalized) {
    tip_ = tip;
    if (finalized > finalized_) progress_.push_back(now);
    finalized_ = std::max(finalized_, finalized);
  }

  void MetricsCollector::on_block_finalized(VirtualTime now, Height height, const Digest &,
                                            size_t tx_count) {
    if (height > finalized_) {
      finalized_ = height;
      progress_.push_back(now);
    }
    tip_ = std::max(tip_, height);
    finalizations_.push_back({now, tx_count});
    series_.push_back({now, tip_, height, "finalized"});
  }

  void MetricsCollector::on_rollback(VirtualTime now, const sim::RollbackEvent &event) {
    ++rollbacks_;
    tip_ = event.to_tip;
    series_.push_back({now, event.to_tip, event.finalized, "rollback"});
  }

  void MetricsCollector::on_tx_resolved(VirtualTime now, const Digest &tx,
                                        TxResolution resolution, Height) {
    ++counts_[static_cast<int>(resolution)];
    if (resolution == TxResolution::kRolledBack) return;  // may be resubmitted
    auto it = pending_.find(tx);
    if (it == pending_.end()) return;
    if (resolution == TxResolution::kFinalized) {
      auto l = (now - it->second).count();
      latency_sum_us_ += l;
      latency_max_us_ = std::max(latency_max_us_, l);
      ++latency_n_;
    }
    pending_.erase(it);
  }

  void MetricsCollector::on_invariant_violation(VirtualTime now, const std::string &what) {
    violations_.push_back("t=" + std::to_string(now.count()) + "us: " + what);
  }

  void MetricsCollector::finish(MetricsReport &r, VirtualTime end) const {
    r.submitted_txs = submitted_;
    r.finalized_txs = counts_[static_cast<int>(TxResolution::kFinalized)];
    r.reverted_txs = counts_[static_cast<int>(TxResolution::kFinalizedReverted)];
    r.rolled_back_txs = counts_[static_cast<int>(TxResolution::kRolledBack)];
    r.excluded_txs = counts_[static_cast<int>(TxResolution::kExcluded)];
    r.dropped_txs = counts_[static_cast<int>(TxResolution::kDropped)];
    r.tip_height = tip_;
    r.finalized_height = finalized_;
    r.blocks_finalized = finalizations_.size();
    r.rollback_count = rollbacks_;
    r.series = series_;
    r.invariant_violations = violations_;

    r.tps = end.count() > 0 ? static_cast<double>(r.finalized_txs) * 1e6
                                  / static_cast<double>(end.count())
                            : 0.0;
    if (finalizations_.size() >= 2) {
      uint64_t txs = 0;
      for (size_t i = 1; i < finalizations_.size(); ++i) txs += finalizations_[i].tx_count;
      auto span = finalizations_.back().at - finalizations_.front().at;
      r.steady_state_tps = span.count() > 0 ? static_cast<double>(txs) * 1e6
                                                  / static_cast<double>(span.count())
                                            : 0.0;
      r.mean_block_interval = seconds(span) / static_cast<double>(finalizations_.size() - 1);
    }
    if (latency_n_ > 0) {
      r.mean_latency = static_cast<double>(latency_sum_us_) / 1e6
                     / static_cast<double>(latency_n_);
      r.max_latency = static_cast<double>(latency_max_us_) / 1e6;
    }

    // Maximal intervals of at least 3 t_block without finalized progress.
    auto threshold = t_block_ * 3;
    VirtualTime last{0};
    auto consider = [&](VirtualTime next) {
      if (next - last >= threshold) r.stall_windows.push_back({last, next});
      last = next;
    };
    for (auto t : progress_) {
      if (t > end) break;
      consider(t);
    }
    if (end > last) consider(end);
  }

}  // namespace shardsim::metrics
