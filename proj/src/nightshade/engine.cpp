/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/nightshade/engine.hpp"

namespace shardsim::nightshade {

  using sim::TxResolution;

  NightshadeEngine::NightshadeEngine(const sim::SimulationParams &params,
                                     BaselineConfig config,
                                     std::vector<ledger::LedgerState> genesis,
                                     ledger::ExecutionConfig exec)
      : params_(params),
        config_(config),
        shards_(params.shards),
        chain_(std::move(genesis), shards_, exec),
        mempool_(shards_) {
    if (config_.producers_per_shard < 1) {
      throw sim::ConfigError("baseline.producers_per_shard", "must be >= 1");
    }
  }

  void NightshadeEngine::start(sim::Scheduler &scheduler) {
    scheduler_ = &scheduler;
    initial_supply_ = chain_.accounted_supply();
    scheduler.schedule_after(params_.t_block, "baseline", [this] { slot(); });
  }

  void NightshadeEngine::submit(ledger::TxPtr tx) {
    if (blacklist_.contains(tx->id)) {
      auto now = scheduler_ ? scheduler_->now() : VirtualTime{0};
      notify([&](auto &o) {
        o.on_tx_resolved(now, tx->id, TxResolution::kExcluded, 0);
      });
      return;
    }
    mempool_.add(std::move(tx));
  }

  Yocto NightshadeEngine::balance_of(const AccountId &account) const {
    return chain_.states()[shards_.of(account).value].balance(account);
  }

  void NightshadeEngine::inject_fault(const RoleId &role,
                                      const sim::FaultBehavior &behavior) {
    bool known = role.kind == RoleKind::kProducer && role.shard
              && role.shard->value < params_.shards
              && role.index < config_.producers_per_shard;
    if (!known) {
      throw sim::FaultError(sim::FaultError::Code::kUnknownRole,
                            "baseline has no role " + role.to_string());
    }
    throw sim::FaultError(sim::FaultError::Code::kUnsupported,
                          "baseline producers have no fault behaviors");
  }

  void NightshadeEngine::slot() {
    ++slot_index_;
    auto now = scheduler_->now();
    if (pending_challenge_ && slot_index_ >= challenge_due_slot_) {
      auto c = *pending_challenge_;
      pending_challenge_.reset();
      apply_challenge(c);
    }

    auto produced = produce_block(chain_, mempool_, config_.producers_per_shard,
                                  params_.max_txs_per_chunk);
    for (const auto &tx : produced.dropped) {
      notify([&](auto &o) {
        o.on_tx_resolved(now, tx->id, TxResolution::kDropped, chain_.tip_height());
      });
    }

    if (!pending_challenge_) {
      if (auto c = detect_inconsistency(chain_)) {
        if (config_.challenge_delay == 0) {
          apply_challenge(*c);
        } else {
          pending_challenge_ = std::move(c);
          challenge_due_slot_ = slot_index_ + config_.challenge_delay;
        }
      }
    }

    notify([&](auto &o) {
      o.on_block_appended(now, chain_.tip_height(), chain_.finalized_height());
    });
    advance_finality();
    if (chain_.accounted_supply() != initial_supply_) {
      notify([&](auto &o) {
        o.on_invariant_violation(now, "baseline supply drifted at height "
                                          + std::to_string(chain_.tip_height()));
      });
    }
    scheduler_->schedule_after(params_.t_block, "baseline", [this] { slot(); });
  }

  void NightshadeEngine::apply_challenge(const Challenge &c) {
    auto now = scheduler_->now();
    RollbackResult res;
    try {
      res = rollback(chain_, c, {config_.refund_gas});
    } catch (const ChainError &e) {
      notify([&](auto &o) {
        o.on_invariant_violation(now, std::string("challenge rejected: ") + e.what());
      });
      return;
    }
    ++rollbacks_;
    mempool_.requeue_front(res.requeue);
    if (config_.blacklist_offenders) blacklist_.insert(c.offending_tx);
    sim::RollbackEvent ev{res.from_tip, res.to_tip, c.block_height,
                          chain_.finalized_height(), c.offending_tx};
    notify([&](auto &o) { o.on_rollback(now, ev); });
    notify([&](auto &o) {
      o.on_tx_resolved(now, c.offending_tx, TxResolution::kRolledBack, c.block_height);
    });
  }

  void NightshadeEngine::advance_finality() {
    auto tip = chain_.tip_height();
    Height lag = 1 + static_cast<Height>(config_.challenge_delay);
    Height target = tip > lag ? tip - lag : 0;
    auto old = chain_.finalized_height();
    if (target <= old) return;
    chain_.finalize_up_to(target);
    auto now = scheduler_->now();
    for (Height h = old + 1; h <= target; ++h) {
      const auto &b = chain_.block(h);
      const auto &rec = chain_.record(h);
      notify([&](auto &o) {
        o.on_block_finalized(now, h, b.block_hash, b.tx_count());
      });
      for (size_t c = 0; c < b.chunks.size(); ++c) {
        const auto &txs = b.chunks[c].txs;
        for (size_t i = 0; i < txs.size(); ++i) {
          auto r = rec.chunks[c].tx_status[i] == ledger::OutcomeStatus::kApplied
                     ? TxResolution::kFinalized
                     : TxResolution::kFinalizedReverted;
          notify([&](auto &o) { o.on_tx_resolved(now, txs[i].id, r, h); });
        }
      }
    }
  }

}  // namespace shardsim::nightshade
