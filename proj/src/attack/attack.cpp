/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/attack/attack.hpp"

#include "shardsim/sim/params.hpp"

namespace shardsim::attack {

  void AttackPlan::validate(uint32_t shard_count) const {
    if (attacker.name.empty()) throw sim::ConfigError("attack.attacker", "empty");
    if (contract_account.name.empty()) {
      throw sim::ConfigError("attack.contract_account", "empty");
    }
    if (shard_count < 2) {
      throw sim::ConfigError("params.shards", "the attack needs at least 2 shards");
    }
    if (ledger::shard_of(attacker, shard_count)
        == ledger::shard_of(contract_account, shard_count)) {
      throw sim::ConfigError("attack.attacker",
                             "attacker and contract must be on different shards");
    }
    if (gas == Yocto{}) throw sim::ConfigError("attack.gas", "must be > 0");
    if (inter_round_delay.count() < 0) {
      throw sim::ConfigError("attack.inter_round_delay", "must be >= 0");
    }
  }

  Digest deploy_attack_contract(const AttackPlan &plan,
                                std::vector<ledger::LedgerState> &genesis,
                                const ledger::ShardMap &shards) {
    auto &cst = genesis.at(shards.of(plan.contract_account).value);
    cst.create_account(plan.contract_account, plan.contract_prefund,
                       ledger::AttackContract{plan.threshold});
    auto &ast = genesis.at(shards.of(plan.attacker).value);
    if (ast.find(plan.attacker) == nullptr) {
      ast.create_account(plan.attacker, plan.attacker_balance);
    }
    ByteWriter w;
    w.str("shardsim/deploy").str(plan.attacker.name).str(plan.contract_account.name);
    w.yocto(plan.threshold);
    return w.finish();
  }

  Digest send_attack_deposit(const AttackPlan &plan, sim::Protocol &protocol,
                             uint64_t nonce) {
    if (protocol.balance_of(plan.attacker) < plan.deposit + plan.gas) {
      throw ledger::LedgerError(ledger::LedgerError::Code::kInsufficientBalance,
                                "attacker cannot cover deposit and gas");
    }
    auto tx = std::make_shared<const ledger::Transaction>(ledger::Transaction::make(
        plan.attacker, plan.contract_account, plan.deposit, plan.gas, nonce,
        ledger::TxKind::kContractCall, "deposit"));
    auto id = tx->id;
    protocol.submit(std::move(tx));
    return id;
  }

  AttackDriver::AttackDriver(AttackPlan plan, sim::Protocol &protocol,
                             sim::Scheduler &scheduler)
      : plan_(std::move(plan)), protocol_(protocol), scheduler_(scheduler) {}

  void AttackDriver::start() {
    if (plan_.rounds == 0) return;
    scheduler_.schedule_at(plan_.start_at, "attacker", [this] {
      started_ = true;
      start_finalized_ = protocol_.finalized_height();
      max_finalized_ = start_finalized_;
      last_rollback_finalized_ = start_finalized_;
      start_balance_ = protocol_.balance_of(plan_.attacker);
      fire();
    });
  }

  bool AttackDriver::active() const {
    return started_ && !finished_;
  }

  void AttackDriver::fire() {
    if (sent_ >= plan_.rounds) return;
    try {
      outstanding_ = send_attack_deposit(plan_, protocol_, sent_);
      ++sent_;
    } catch (const ledger::LedgerError &) {
      // Out of funds: the attack ends here.
      finished_ = true;
      end_finalized_ = protocol_.finalized_height();
    }
  }

  void AttackDriver::on_block_finalized(VirtualTime, Height height, const Digest &,
                                        size_t) {
    if (active() && height > max_finalized_) max_finalized_ = height;
  }

  void AttackDriver::on_rollback(VirtualTime, const sim::RollbackEvent &event) {
    if (!active()) return;
    auto gain = event.finalized > last_rollback_finalized_
                  ? event.finalized - last_rollback_finalized_
                  : 0;
    if (gain > max_gain_) max_gain_ = gain;
    last_rollback_finalized_ = event.finalized;
  }

  void AttackDriver::on_tx_resolved(VirtualTime, const Digest &tx,
                                    sim::TxResolution resolution, Height) {
    if (!outstanding_ || tx != *outstanding_) return;
    outstanding_.reset();
    if (resolution == sim::TxResolution::kRolledBack) ++rollbacks_;
    if (resolution == sim::TxResolution::kExcluded) ++excluded_;
    if (sent_ >= plan_.rounds) {
      finished_ = true;
      end_finalized_ = protocol_.finalized_height();
      return;
    }
    if (plan_.inter_round_delay.count() == 0) {
      // Resubmit inside the callback so the deposit is in the mempool before
      // the next block is built.
      fire();
    } else {
      scheduler_.schedule_after(plan_.inter_round_delay, "attacker",
                                [this] { fire(); });
    }
  }

  AttackReport AttackDriver::report() const {
    AttackReport r;
    r.rounds_executed = sent_;
    r.rollbacks_caused = rollbacks_;
    r.excluded = excluded_;
    if (!started_) return r;
    r.max_finalized_height_during_attack = max_finalized_;
    auto end = finished_ ? end_finalized_ : protocol_.finalized_height();
    r.net_height_progress = end > start_finalized_ ? end - start_finalized_ : 0;
    r.max_progress_between_rollbacks = max_gain_;
    auto now_balance = protocol_.balance_of(plan_.attacker);
    r.attacker_cost = start_balance_ > now_balance ? start_balance_ - now_balance
                                                   : Yocto{};
    return r;
  }

}  // namespace shardsim::attack
