/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <random>
#include <vector>

#include "shardsim/sim/protocol.hpp"

namespace shardsim::sim {

  enum class Arrival {
    kPoisson,  // exponential gaps at tx_rate
    kUniform,  // fixed gap 1 / tx_rate, senders taken round-robin
  };

  std::string_view to_string(Arrival a);
  Arrival parse_arrival(std::string_view text);

  struct WorkloadSpec {
    double tx_rate = 100.0;  // transactions per virtual second
    double cstx_fraction = 0.5;
    uint32_t accounts = 16;
    Yocto initial_balance = near(1000);
    Yocto amount = milli_near(1);
    Yocto gas = milli_near(1);
    Arrival arrival = Arrival::kPoisson;

    void validate(uint32_t shard_count) const;
  };

  /// Names "user-<k>" for k = 0, 1, ... keeping each one only while its shard
  /// is below quota, so shard i ends up with accounts / s users (plus one for
  /// the first accounts % s shards). Ordered so that consecutive entries
  /// cycle through the shards.
  std::vector<AccountId> workload_accounts(uint32_t accounts, const ledger::ShardMap &shards);

  /// Drives user transactions into a protocol from a seeded mt19937_64.
  /// Poisson gaps are -ln(1 - u) / tx_rate with u = (x >> 11) * 2^-53; a
  /// sender index is x mod n; a transaction is cross-shard when u <
  /// cstx_fraction.
  class WorkloadGenerator {
   public:
    WorkloadGenerator(WorkloadSpec spec, const ledger::ShardMap &shards, uint64_t seed);

    /// Creates every workload account with initial_balance.
    void fund(std::vector<ledger::LedgerState> &genesis) const;

    /// Schedules arrivals in (0, end].
    void start(Scheduler &scheduler, Protocol &protocol, VirtualTime end);

    /// Called with every transaction right after it is submitted.
    void on_submit(std::function<void(VirtualTime, const ledger::TxPtr &)> fn) {
      on_submit_ = std::move(fn);
    }

    uint64_t submitted() const {
      return submitted_;
    }
    const std::vector<AccountId> &accounts() const {
      return accounts_;
    }

    /// Next transaction in the stream (advances the generator).
    ledger::TxPtr next_transaction();

   private:
    double unit();
    VirtualTime next_arrival(VirtualTime now);
    void schedule_next();
    void arrive();

    WorkloadSpec spec_;
    const ledger::ShardMap &shards_;
    std::mt19937_64 rng_;
    std::vector<AccountId> accounts_;
    std::vector<std::vector<size_t>> by_shard_;
    std::vector<uint64_t> nonces_;
    uint64_t submitted_ = 0;
    uint64_t scheduled_ = 0;
    uint64_t cursor_ = 0;
    Scheduler *scheduler_ = nullptr;
    Protocol *protocol_ = nullptr;
    VirtualTime end_{0};
    VirtualTime origin_{0};
    std::function<void(VirtualTime, const ledger::TxPtr &)> on_submit_;
  };

}  // namespace shardsim::sim
