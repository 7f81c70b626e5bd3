/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/sim/workload.hpp"

#include <cmath>

#include "shardsim/sim/params.hpp"

namespace shardsim::sim {

  std::string_view to_string(Arrival a) {
    return a == Arrival::kPoisson ? "poisson" : "uniform";
  }

  Arrival parse_arrival(std::string_view text) {
    if (text == "poisson") return Arrival::kPoisson;
    if (text == "uniform") return Arrival::kUniform;
    throw ConfigError("workload.arrival", "expected poisson or uniform, got " + std::string(text));
  }

  void WorkloadSpec::validate(uint32_t shard_count) const {
    if (!(tx_rate >= 0) || !std::isfinite(tx_rate)) {
      throw ConfigError("workload.tx_rate", "must be a finite number >= 0");
    }
    if (!(cstx_fraction >= 0 && cstx_fraction <= 1)) {
      throw ConfigError("workload.cstx_fraction", "must be in [0, 1]");
    }
    if (cstx_fraction > 0 && shard_count < 2) {
      throw ConfigError("workload.cstx_fraction", "cross-shard traffic needs at least 2 shards");
    }
    if (tx_rate > 0 && accounts < 2) {
      throw ConfigError("workload.accounts", "need at least 2 accounts");
    }
    if (gas == Yocto{}) throw ConfigError("workload.gas", "must be > 0");
  }

  std::vector<AccountId> workload_accounts(uint32_t accounts, const ledger::ShardMap &shards) {
    auto s = shards.shard_count();
    std::vector<std::vector<AccountId>> per(s);
    std::vector<uint32_t> quota(s, accounts / s);
    for (uint32_t i = 0; i < accounts % s; ++i) ++quota[i];
    uint32_t placed = 0;
    for (uint64_t k = 0; placed < accounts; ++k) {
      AccountId id{"user-" + std::to_string(k)};
      auto shard = shards.of(id).value;
      if (per[shard].size() < quota[shard]) {
        per[shard].push_back(std::move(id));
        ++placed;
      }
    }
    std::vector<AccountId> out;
    for (uint32_t round = 0; out.size() < accounts; ++round) {
      for (uint32_t i = 0; i < s; ++i) {
        if (round < per[i].size()) out.push_back(per[i][round]);
      }
    }
    return out;
  }

  WorkloadGenerator::WorkloadGenerator(WorkloadSpec spec, const ledger::ShardMap &shards,
                                       uint64_t seed)
      : spec_(spec), shards_(shards), rng_(seed) {
    spec_.validate(shards.shard_count());
    accounts_ = workload_accounts(spec_.accounts, shards);
    by_shard_.resize(shards.shard_count());
    for (size_t i = 0; i < accounts_.size(); ++i) {
      by_shard_[shards.of(accounts_[i]).value].push_back(i);
    }
    nonces_.assign(accounts_.size(), 0);
  }

  void WorkloadGenerator::fund(std::vector<ledger::LedgerState> &genesis) const {
    for (const auto &a : accounts_) {
      genesis[shards_.of(a).value].create_account(a, spec_.initial_balance);
    }
  }

  double WorkloadGenerator::unit() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  VirtualTime WorkloadGenerator::next_arrival(VirtualTime now) {
    if (spec_.arrival == Arrival::kUniform) {
      // Placed on the exact grid so rounding never accumulates.
      auto k = static_cast<double>(scheduled_ + 1);
      return origin_ + VirtualTime{std::llround(k * 1e6 / spec_.tx_rate)};
    }
    double seconds = -std::log(1.0 - unit()) / spec_.tx_rate;
    return now + VirtualTime{std::llround(seconds * 1e6)};
  }

  ledger::TxPtr WorkloadGenerator::next_transaction() {
    size_t n = accounts_.size();
    size_t from = spec_.arrival == Arrival::kUniform ? cursor_++ % n : rng_() % n;
    auto home = shards_.of(accounts_[from]).value;
    bool cross = unit() < spec_.cstx_fraction;
    auto pick_other_shard = [&]() -> std::optional<size_t> {
      size_t others = n - by_shard_[home].size();
      if (others == 0) return std::nullopt;
      auto k = rng_() % others;
      for (size_t i = 0; i < by_shard_.size(); ++i) {
        if (i == home) continue;
        if (k < by_shard_[i].size()) return by_shard_[i][k];
        k -= by_shard_[i].size();
      }
      return std::nullopt;
    };
    auto pick_same_shard = [&]() -> std::optional<size_t> {
      const auto &mates = by_shard_[home];
      if (mates.size() < 2) return std::nullopt;
      auto k = rng_() % (mates.size() - 1);
      auto to = mates[k];
      return to == from ? mates.back() : to;
    };
    auto to = cross ? pick_other_shard() : pick_same_shard();
    if (!to) to = cross ? pick_same_shard() : pick_other_shard();
    if (!to) to = from;
    return std::make_shared<const ledger::Transaction>(ledger::Transaction::make(
        accounts_[from], accounts_[*to], spec_.amount, spec_.gas, nonces_[from]++));
  }

  void WorkloadGenerator::start(Scheduler &scheduler, Protocol &protocol, VirtualTime end) {
    scheduler_ = &scheduler;
    protocol_ = &protocol;
    end_ = end;
    origin_ = scheduler.now();
    if (spec_.tx_rate <= 0) return;
    schedule_next();
  }

  void WorkloadGenerator::arrive() {
    auto tx = next_transaction();
    protocol_->submit(tx);
    ++submitted_;
    if (on_submit_) on_submit_(scheduler_->now(), tx);
    schedule_next();
  }

  void WorkloadGenerator::schedule_next() {
    auto at = next_arrival(scheduler_->now());
    ++scheduled_;
    if (at <= end_) scheduler_->schedule_at(at, "workload", [this] { arrive(); });
  }

}  // namespace shardsim::sim
