/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "shardsim/nightshade/chain.hpp"
#include "shardsim/sim/params.hpp"
#include "shardsim/sim/protocol.hpp"

namespace shardsim::nightshade {

  struct BaselineConfig {
    /// Blocks between the reverted receipt and the rollback it triggers.
    uint32_t challenge_delay = 1;
    bool refund_gas = false;
    /// Refuse resubmission of a transaction that caused a rollback.
    bool blacklist_offenders = false;
    uint32_t producers_per_shard = 1;
  };

  /// Slot-driven baseline. Each slot (every t_block): apply a due challenge,
  /// produce one block, look for a new inconsistency, then advance the
  /// finalized height to tip - 1 - challenge_delay.
  class NightshadeEngine : public sim::Protocol {
   public:
    NightshadeEngine(const sim::SimulationParams &params, BaselineConfig config,
                     std::vector<ledger::LedgerState> genesis,
                     ledger::ExecutionConfig exec = {});

    std::string_view name() const override {
      return "baseline";
    }
    void start(sim::Scheduler &scheduler) override;
    void submit(ledger::TxPtr tx) override;
    Height tip_height() const override {
      return chain_.tip_height();
    }
    Height finalized_height() const override {
      return chain_.finalized_height();
    }
    Yocto balance_of(const AccountId &account) const override;
    Yocto accounted_supply() const override {
      return chain_.accounted_supply();
    }
    void inject_fault(const RoleId &role, const sim::FaultBehavior &behavior) override;

    const ChainView &chain() const {
      return chain_;
    }
    size_t rollback_count() const {
      return rollbacks_;
    }

   private:
    void slot();
    void apply_challenge(const Challenge &c);
    void advance_finality();

    sim::SimulationParams params_;
    BaselineConfig config_;
    ledger::ShardMap shards_;
    ChainView chain_;
    Mempool mempool_;
    sim::Scheduler *scheduler_ = nullptr;
    std::optional<Challenge> pending_challenge_;
    uint64_t challenge_due_slot_ = 0;
    uint64_t slot_index_ = 0;
    size_t rollbacks_ = 0;
    Yocto initial_supply_;
    std::unordered_set<Digest, DigestHash> blacklist_;
  };

}  // namespace shardsim::nightshade
