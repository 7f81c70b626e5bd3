/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <unordered_map>
#include <unordered_set>

#include "shardsim/nightshade/mempool.hpp"
#include "shardsim/sim/params.hpp"
#include "shardsim/sim/protocol.hpp"
#include "shardsim/synchro/producer.hpp"
#include "shardsim/synchro/validator.hpp"

namespace shardsim::synchro {

  struct SynchroConfig {
    uint32_t coordinators = 1;
    uint32_t producers_per_shard = 1;
    uint32_t global_validators = 1;
    /// Heights that may be built beyond the finalized height.
    uint32_t pipeline_depth = 4;
    uint64_t reward_per_block = 1;
    bool unsound_proofs = false;

    void validate() const;
  };

  /// Event-driven Synchro. Coordinators build a candidate every t_block,
  /// producers verify and prove one coordinator's chunk each, and the global
  /// validators finalize heights one at a time from the proven chunks.
  class SynchroEngine : public sim::Protocol {
   public:
    SynchroEngine(const sim::SimulationParams &params, SynchroConfig config,
                  std::vector<ledger::LedgerState> genesis,
                  ledger::ExecutionConfig exec = {});

    std::string_view name() const override {
      return "synchro";
    }
    void start(sim::Scheduler &scheduler) override;
    void submit(ledger::TxPtr tx) override;
    Height tip_height() const override {
      return next_build_ - 1;
    }
    Height finalized_height() const override {
      return finalized_height_;
    }
    Yocto balance_of(const AccountId &account) const override;
    Yocto accounted_supply() const override;
    void inject_fault(const RoleId &role, const sim::FaultBehavior &behavior) override;
    std::map<std::string, uint64_t> rewards() const override;

    /// Finalized blocks are never undone; a nonzero value means fork choice
    /// moved away from the finalized chain.
    size_t rollback_count() const {
      return reorgs_;
    }
    /// Heights the global validators could not finalize from any group.
    const std::vector<std::pair<Height, GvError>> &failures() const {
      return failures_;
    }
    Height next_build_height() const {
      return next_build_;
    }
    const Digest &finalized_hash() const {
      return finalized_hash_;
    }
    const std::vector<ledger::LedgerState> &finalized_states() const {
      return *finalized_states_;
    }
    const TrustLedger &trust() const {
      return trust_;
    }
    const RewardLedger &reward_ledger() const {
      return rewards_;
    }
    const BlockTree &tree() const {
      return tree_;
    }
    const ledger::ShardMap &shards() const {
      return shards_;
    }
    /// Called with every block as it is finalized.
    void on_finalized_block(std::function<void(const Block &)> hook) {
      finalized_hook_ = std::move(hook);
    }

   private:
    using States = std::shared_ptr<const std::vector<ledger::LedgerState>>;

    struct Candidate {
      std::shared_ptr<const Block> block;
      States post_states;
      std::vector<RoleId> builders;
    };

    struct HeightWork {
      uint64_t epoch = 0;
      std::map<Digest, Candidate> candidates;
      std::map<RoleId, Digest> by_coordinator;
      std::vector<Submission> submissions;
      size_t awaiting = 0;
    };

    struct ProducerFault {
      bool malformed = false;
    };
    struct CoordinatorFault {
      std::optional<AccountId> ignore_user;
      bool cstx_only = false;
    };

    void tick();
    bool can_build() const;
    void build_height(Height h);
    std::optional<Digest> choose_parent(const RoleId &coordinator, Height h) const;
    bool viable(Height h, const Digest &hash) const;
    const Candidate *candidate(Height h, const Digest &hash) const;
    States states_of(Height h, const Digest &hash) const;
    std::unordered_set<Digest, DigestHash> in_flight(Height parent_height,
                                                     Digest parent) const;
    void dispatch(Height h);
    void submission_ready(Height h, uint64_t epoch, std::optional<Submission> sub);
    void try_start_gv();
    void settle(Height h, uint64_t epoch, GvOutcome outcome);
    void finalize(Height h, const Block &block, const std::vector<RoleId> &producers);
    void reset_from(Height h);
    void violation(const std::string &what);

    sim::SimulationParams params_;
    SynchroConfig config_;
    ledger::ExecutionConfig exec_;
    ledger::ShardMap shards_;
    ProofSystem proofs_;
    nightshade::Mempool mempool_;
    sim::Scheduler *scheduler_ = nullptr;

    std::vector<RoleId> coordinators_;
    std::vector<std::vector<RoleId>> producers_;  // [shard][index]
    std::vector<RoleId> validators_;
    std::map<RoleId, CoordinatorFault> coordinator_faults_;
    std::map<RoleId, ProducerFault> producer_faults_;
    std::set<RoleId> bad_validators_;

    Height finalized_height_ = 0;
    Digest finalized_hash_;
    std::vector<Digest> finalized_roots_;
    States finalized_states_;
    Height next_build_ = 1;
    bool build_blocked_ = false;
    bool gv_busy_ = false;
    uint64_t epoch_ = 0;
    std::map<Height, HeightWork> work_;
    std::vector<std::vector<VirtualTime>> producer_free_;

    TrustLedger trust_;
    RewardLedger rewards_;
    BlockTree tree_;
    std::map<RoleId, Digest> bad_fork_tip_;
    Yocto burned_;
    Yocto initial_supply_;
    size_t reorgs_ = 0;
    std::vector<std::pair<Height, GvError>> failures_;
    std::function<void(const Block &)> finalized_hook_;
  };

}  // namespace shardsim::synchro
