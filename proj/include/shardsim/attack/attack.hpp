/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <vector>

#include "shardsim/core/ledger.hpp"
#include "shardsim/sim/protocol.hpp"
#include "shardsim/sim/scheduler.hpp"

namespace shardsim::attack {

  struct AttackPlan {
    AccountId attacker{"attacker"};
    AccountId contract_account{"contract"};
    Yocto deposit = near(1);
    uint32_t rounds = 10;
    VirtualTime inter_round_delay{0};
    /// First deposit goes out at this virtual time.
    VirtualTime start_at{0};
    Yocto gas = milli_near(1);
    /// Guard threshold stored in the contract.
    Yocto threshold = near(1);
    /// Balance the contract holds at deployment. With the default prose
    /// guard a 1 NEAR deposit only reverts if the contract already holds
    /// something, so it is pre-funded.
    Yocto contract_prefund = milli_near(500);
    Yocto attacker_balance = near(100);

    /// Throws sim::ConfigError when the attacker shares the contract's shard
    /// or the amounts are unusable.
    void validate(uint32_t shard_count) const;
  };

  struct AttackReport {
    uint32_t rounds_executed = 0;
    uint32_t rollbacks_caused = 0;
    uint32_t excluded = 0;  // deposits refused by block builders
    Height max_finalized_height_during_attack = 0;
    Height net_height_progress = 0;
    /// Largest finalized-height gain between two consecutive rollbacks.
    Height max_progress_between_rollbacks = 0;
    Yocto attacker_cost;
  };

  /// Registers the attack contract and funds the attacker in the genesis
  /// states. Returns the deployment id. Throws LedgerError(kAccountTaken) if
  /// the contract account exists.
  Digest deploy_attack_contract(const AttackPlan &plan,
                                std::vector<ledger::LedgerState> &genesis,
                                const ledger::ShardMap &shards);

  /// Submits one cross-shard deposit call. Throws
  /// LedgerError(kInsufficientBalance) when the attacker cannot pay for it.
  Digest send_attack_deposit(const AttackPlan &plan, sim::Protocol &protocol,
                             uint64_t nonce);

  /// The repeating attack: the next deposit goes out `inter_round_delay`
  /// after the previous one was resolved (rolled back, excluded or
  /// finalized), so every deposit lands while the chain is recovering from
  /// the last one.
  class AttackDriver : public sim::ProtocolObserver {
   public:
    AttackDriver(AttackPlan plan, sim::Protocol &protocol, sim::Scheduler &scheduler);

    void start();
    AttackReport report() const;

    void on_block_finalized(VirtualTime now, Height height, const Digest &hash,
                            size_t tx_count) override;
    void on_rollback(VirtualTime now, const sim::RollbackEvent &event) override;
    void on_tx_resolved(VirtualTime now, const Digest &tx,
                        sim::TxResolution resolution, Height height) override;

   private:
    void fire();
    bool active() const;

    AttackPlan plan_;
    sim::Protocol &protocol_;
    sim::Scheduler &scheduler_;
    std::optional<Digest> outstanding_;
    uint32_t sent_ = 0;
    uint32_t rollbacks_ = 0;
    uint32_t excluded_ = 0;
    bool started_ = false;
    bool finished_ = false;
    Height start_finalized_ = 0;
    Height end_finalized_ = 0;
    Height max_finalized_ = 0;
    Height last_rollback_finalized_ = 0;
    Height max_gain_ = 0;
    Yocto start_balance_;
  };

}  // namespace shardsim::attack
