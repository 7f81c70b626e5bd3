/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/synchro/engine.hpp"

#include <algorithm>

namespace shardsim::synchro {

  using ledger::LedgerState;
  using sim::TxResolution;

  void SynchroConfig::validate() const {
    if (coordinators < 1) throw sim::ConfigError("synchro.coordinators", "must be >= 1");
    if (producers_per_shard < 1) {
      throw sim::ConfigError("synchro.producers_per_shard", "must be >= 1");
    }
    if (global_validators < 1) {
      throw sim::ConfigError("synchro.global_validators", "must be >= 1");
    }
    if (pipeline_depth < 1) throw sim::ConfigError("synchro.pipeline_depth", "must be >= 1");
  }

  namespace {
    Block genesis_of(const std::vector<LedgerState> &states, uint32_t shards) {
      if (states.size() != shards) {
        throw sim::ConfigError("params.shards", "genesis has " + std::to_string(states.size())
                                                    + " shards");
      }
      return nightshade::genesis_block(shards, states);
    }
  }  // namespace

  SynchroEngine::SynchroEngine(const sim::SimulationParams &params, SynchroConfig config,
                               std::vector<LedgerState> genesis,
                               ledger::ExecutionConfig exec)
      : params_(params),
        config_(config),
        exec_(exec),
        shards_(params.shards),
        proofs_(config.unsound_proofs),
        mempool_(shards_),
        rewards_(config.reward_per_block),
        tree_(genesis_of(genesis, params.shards)) {
    config_.validate();
    for (uint32_t i = 0; i < config_.coordinators; ++i) {
      coordinators_.push_back(RoleId::coordinator(i));
    }
    producers_.resize(params.shards);
    producer_free_.assign(params.shards,
                          std::vector<VirtualTime>(config_.producers_per_shard, VirtualTime{0}));
    for (uint32_t s = 0; s < params.shards; ++s) {
      for (uint32_t j = 0; j < config_.producers_per_shard; ++j) {
        producers_[s].push_back(RoleId::producer(ShardId{s}, j));
      }
    }
    for (uint32_t i = 0; i < config_.global_validators; ++i) {
      validators_.push_back(RoleId::global_validator(i));
    }
    finalized_hash_ = tree_.genesis();
    for (const auto &st : genesis) finalized_roots_.push_back(st.state_root());
    finalized_states_ = std::make_shared<const std::vector<LedgerState>>(std::move(genesis));
  }

  void SynchroEngine::start(sim::Scheduler &scheduler) {
    scheduler_ = &scheduler;
    initial_supply_ = accounted_supply();
    scheduler.schedule_after(params_.t_block, "synchro", [this] { tick(); });
  }

  void SynchroEngine::submit(ledger::TxPtr tx) {
    mempool_.add(std::move(tx));
  }

  Yocto SynchroEngine::balance_of(const AccountId &account) const {
    return (*finalized_states_)[shards_.of(account).value].balance(account);
  }

  Yocto SynchroEngine::accounted_supply() const {
    Yocto total = burned_;
    for (const auto &st : *finalized_states_) total += st.total_balance();
    return total;
  }

  void SynchroEngine::inject_fault(const RoleId &role, const sim::FaultBehavior &behavior) {
    using sim::FaultError;
    using sim::FaultKind;
    auto unsupported = [&] {
      throw FaultError(FaultError::Code::kUnsupported,
                       std::string(sim::to_string(behavior.kind)) + " does not apply to "
                           + role.to_string());
    };
    switch (role.kind) {
      case RoleKind::kCoordinator:
        if (role.index >= config_.coordinators) break;
        if (behavior.kind == FaultKind::kIgnoreUser) {
          coordinator_faults_[role].ignore_user = behavior.target;
        } else if (behavior.kind == FaultKind::kCstxOnlyBlocks) {
          coordinator_faults_[role].cstx_only = true;
        } else {
          unsupported();
        }
        return;
      case RoleKind::kProducer:
        if (!role.shard || role.shard->value >= params_.shards
            || role.index >= config_.producers_per_shard) {
          break;
        }
        if (behavior.kind != FaultKind::kMalformedChunks) unsupported();
        producer_faults_[role].malformed = true;
        return;
      case RoleKind::kGlobalValidator:
        if (role.index >= config_.global_validators) break;
        if (behavior.kind != FaultKind::kBadCombinations) unsupported();
        bad_validators_.insert(role);
        return;
    }
    throw FaultError(FaultError::Code::kUnknownRole, "synchro has no role " + role.to_string());
  }

  std::map<std::string, uint64_t> SynchroEngine::rewards() const {
    std::map<std::string, uint64_t> out;
    for (const auto &[role, amount] : rewards_.rewards()) out[role.to_string()] = amount;
    return out;
  }

  void SynchroEngine::violation(const std::string &what) {
    auto now = scheduler_->now();
    notify([&](auto &o) { o.on_invariant_violation(now, what); });
  }

  bool SynchroEngine::can_build() const {
    return next_build_ <= finalized_height_ + config_.pipeline_depth;
  }

  void SynchroEngine::tick() {
    if (can_build()) {
      build_height(next_build_);
    } else {
      build_blocked_ = true;
    }
    scheduler_->schedule_after(params_.t_block, "synchro", [this] { tick(); });
  }

  const SynchroEngine::Candidate *SynchroEngine::candidate(Height h,
                                                           const Digest &hash) const {
    auto w = work_.find(h);
    if (w == work_.end()) return nullptr;
    auto c = w->second.candidates.find(hash);
    return c == w->second.candidates.end() ? nullptr : &c->second;
  }

  bool SynchroEngine::viable(Height h, const Digest &hash) const {
    if (h <= finalized_height_) return h == finalized_height_ && hash == finalized_hash_;
    const auto *c = candidate(h, hash);
    return c && viable(h - 1, c->block->parent);
  }

  SynchroEngine::States SynchroEngine::states_of(Height h, const Digest &hash) const {
    if (h == finalized_height_ && hash == finalized_hash_) return finalized_states_;
    const auto *c = candidate(h, hash);
    return c ? c->post_states : nullptr;
  }

  std::optional<Digest> SynchroEngine::choose_parent(const RoleId &coordinator,
                                                     Height h) const {
    Height ph = h - 1;
    if (ph == finalized_height_) return finalized_hash_;
    auto w = work_.find(ph);
    if (w == work_.end()) return std::nullopt;
    auto own = w->second.by_coordinator.find(coordinator);
    if (own != w->second.by_coordinator.end() && viable(ph, own->second)) {
      return own->second;
    }
    // Same preference the global validators apply.
    const Candidate *best = nullptr;
    Digest best_hash;
    for (const auto &[hash, c] : w->second.candidates) {
      if (!viable(ph, hash)) continue;
      bool better = !best || c.block->tx_count() > best->block->tx_count()
                 || (c.block->tx_count() == best->block->tx_count()
                     && c.builders.size() > best->builders.size());
      if (better) {
        best = &c;
        best_hash = hash;
      }
    }
    if (!best) return std::nullopt;
    return best_hash;
  }

  std::unordered_set<Digest, DigestHash> SynchroEngine::in_flight(Height ph,
                                                                  Digest parent) const {
    std::unordered_set<Digest, DigestHash> ids;
    while (ph > finalized_height_) {
      const auto *c = candidate(ph, parent);
      if (!c) break;
      for (const auto &chunk : c->block->chunks) {
        for (const auto &tx : chunk.txs) ids.insert(tx.id);
      }
      parent = c->block->parent;
      --ph;
    }
    return ids;
  }

  void SynchroEngine::build_height(Height h) {
    build_blocked_ = false;
    auto &work = work_[h];
    work = HeightWork{};
    work.epoch = epoch_;
    std::unordered_set<Digest, DigestHash> included;
    std::vector<TxPtr> excluded;
    for (const auto &coord : coordinators_) {
      auto parent = choose_parent(coord, h);
      if (!parent) continue;
      auto parent_states = states_of(h - 1, *parent);
      if (!parent_states) continue;
      auto skip = in_flight(h - 1, *parent);
      TxSource source = [&](ShardId shard, const TxVisitor &visit) {
        mempool_.visit(shard, [&](const TxPtr &tx) {
          return skip.contains(tx->id) || visit(tx);
        });
      };
      BuildConfig cfg;
      cfg.max_txs_per_chunk = params_.max_txs_per_chunk;
      cfg.exec = exec_;
      if (auto f = coordinator_faults_.find(coord); f != coordinator_faults_.end()) {
        cfg.ignore_user = f->second.ignore_user;
        cfg.cstx_only = f->second.cstx_only;
      }
      auto res = coordinator_build_block(coord, source, h, *parent, *parent_states, shards_,
                                         cfg);
      for (const auto &tx : res.included) included.insert(tx->id);
      excluded.insert(excluded.end(), res.excluded.begin(), res.excluded.end());
      auto hash = res.candidate.hash();
      work.by_coordinator[coord] = hash;
      auto [it, fresh] = work.candidates.try_emplace(hash);
      if (fresh) {
        it->second.block = std::make_shared<const Block>(std::move(res.candidate.block));
        it->second.post_states =
            std::make_shared<const std::vector<LedgerState>>(std::move(res.post_states));
      }
      it->second.builders.push_back(coord);
    }
    next_build_ = h + 1;

    auto now = scheduler_->now();
    std::unordered_set<Digest, DigestHash> seen;
    std::vector<Digest> resolved;
    for (const auto &tx : excluded) {
      if (included.contains(tx->id) || !seen.insert(tx->id).second) continue;
      mempool_.erase(tx->id);
      resolved.push_back(tx->id);
    }
    for (const auto &id : resolved) {
      notify([&](auto &o) { o.on_tx_resolved(now, id, TxResolution::kExcluded, h); });
    }
    notify([&](auto &o) { o.on_block_appended(now, tip_height(), finalized_height_); });

    if (work_.contains(h) && !work_[h].candidates.empty()) {
      dispatch(h);
    } else {
      // Nothing to build on; retry from the finalized height.
      work_.erase(h);
      next_build_ = h;
      build_blocked_ = true;
    }
  }

  void SynchroEngine::dispatch(Height h) {
    auto &work = work_[h];
    auto now = scheduler_->now();
    // Keep the configured coordinator order for rotation.
    std::vector<RoleId> ordered;
    for (const auto &c : coordinators_) {
      if (work.by_coordinator.contains(c)) ordered.push_back(c);
    }
    VerifyConfig vcfg{params_.max_txs_per_chunk, exec_};
    work.awaiting = params_.shards * config_.producers_per_shard;
    auto epoch = work.epoch;
    for (uint32_t s = 0; s < params_.shards; ++s) {
      for (uint32_t j = 0; j < config_.producers_per_shard; ++j) {
        const auto &prover = producers_[s][j];
        auto coord = producer_pick_coordinator(trust_, ordered, h + j);
        const auto &cand = work.candidates.at(work.by_coordinator.at(coord));
        auto parent_states = states_of(h - 1, cand.block->parent);
        std::optional<Submission> sub;
        auto start = std::max(now + params_.network_latency, producer_free_[s][j]);
        auto done = start + params_.t_chunk;
        if (parent_states) {
          Chunk chunk = cand.block->chunks[s];
          auto verdict = producer_verify_chunk(chunk, ShardId{s}, (*parent_states)[s],
                                               shards_, vcfg);
          if (verdict.accepted) {
            auto proof = producer_make_proof(chunk, verdict, prover, params_, proofs_);
            done += proof.modeled_prove_cost;
            auto f = producer_faults_.find(prover);
            if (f != producer_faults_.end() && f->second.malformed) {
              chunk = corrupt_chunk(chunk);
            }
            sub = Submission{std::move(chunk), std::move(proof)};
          }
        }
        producer_free_[s][j] = done;
        scheduler_->schedule_at(done + params_.network_latency, prover.to_string(),
                                [this, h, epoch, sub = std::move(sub)]() mutable {
                                  submission_ready(h, epoch, std::move(sub));
                                });
      }
    }
  }

  void SynchroEngine::submission_ready(Height h, uint64_t epoch,
                                       std::optional<Submission> sub) {
    auto w = work_.find(h);
    if (w == work_.end() || w->second.epoch != epoch) return;
    if (sub) w->second.submissions.push_back(std::move(*sub));
    if (w->second.awaiting > 0) --w->second.awaiting;
    try_start_gv();
  }

  void SynchroEngine::try_start_gv() {
    if (gv_busy_) return;
    Height h = finalized_height_ + 1;
    auto w = work_.find(h);
    if (w == work_.end() || w->second.awaiting > 0 || w->second.candidates.empty()) return;
    GvRequest rq;
    rq.height = h;
    rq.parent_hash = finalized_hash_;
    rq.parent_roots = finalized_roots_;
    rq.submissions = w->second.submissions;
    rq.shards = &shards_;
    rq.proofs = &proofs_;
    rq.trust = &trust_;
    rq.t_zk_v = params_.t_zk_v;
    rq.rotation = h;
    auto outcome = gv_reconstruct_and_finalize(rq);
    gv_busy_ = true;
    auto epoch = w->second.epoch;
    auto at = scheduler_->now() + outcome.verify_cost;
    scheduler_->schedule_at(at, "gv", [this, h, epoch, outcome = std::move(outcome)]() mutable {
      settle(h, epoch, std::move(outcome));
    });
  }

  void SynchroEngine::settle(Height h, uint64_t epoch, GvOutcome outcome) {
    gv_busy_ = false;
    auto w = work_.find(h);
    if (w != work_.end() && w->second.epoch == epoch && h == finalized_height_ + 1) {
      if (outcome.block) {
        finalize(h, *outcome.block, outcome.producers);
      } else {
        failures_.emplace_back(h, *outcome.error);
        reset_from(h);
      }
    }
    if (build_blocked_ && can_build()) build_height(next_build_);
    try_start_gv();
  }

  void SynchroEngine::finalize(Height h, const Block &block,
                               const std::vector<RoleId> &producers) {
    auto now = scheduler_->now();
    auto &work = work_.at(h);
    const auto &cand = work.candidates.at(block.block_hash);

    std::vector<RoleId> contributors = producers;
    contributors.insert(contributors.end(), cand.builders.begin(), cand.builders.end());
    for (const auto &gv : validators_) {
      if (bad_validators_.contains(gv)) {
        // Signs its own non-atomic variant on its own fork.
        Block variant = block;
        auto fork = bad_fork_tip_.find(gv);
        if (fork != bad_fork_tip_.end()) variant.parent = fork->second;
        bool stripped = false;
        for (auto &c : variant.chunks) {
          stripped = stripped || !c.receipts.empty();
          c.receipts.clear();
        }
        if (!stripped && !variant.chunks.empty()) variant.chunks.front().txs.clear();
        variant.block_hash =
            nightshade::compute_block_hash(variant.height, variant.parent, variant.chunks);
        tree_.add(variant, gv, shards_);
        bad_fork_tip_[gv] = variant.block_hash;
      } else {
        tree_.add(block, gv, shards_);
        contributors.push_back(gv);
      }
    }
    trust_.credit_block(contributors);
    rewards_.reward_block(contributors);

    finalized_height_ = h;
    finalized_hash_ = block.block_hash;
    finalized_states_ = cand.post_states;
    finalized_roots_.clear();
    for (const auto &c : block.chunks) finalized_roots_.push_back(c.post_state_root);

    if (!check_atomicity(block, shards_)) {
      violation("non-atomic block finalized at height " + std::to_string(h));
    }
    if (tree_.best_tip() != finalized_hash_) {
      ++reorgs_;
      violation("fork choice left the finalized chain at height " + std::to_string(h));
    }
    for (const auto &c : block.chunks) {
      for (const auto &tx : c.txs) {
        burned_ += tx.gas;
        mempool_.erase(tx.id);
      }
    }
    if (finalized_hook_) finalized_hook_(block);
    work_.erase(h);

    notify([&](auto &o) {
      o.on_block_finalized(now, h, block.block_hash, block.tx_count());
    });
    for (const auto &c : block.chunks) {
      for (const auto &tx : c.txs) {
        notify([&](auto &o) { o.on_tx_resolved(now, tx.id, TxResolution::kFinalized, h); });
      }
    }
    notify([&](auto &o) { o.on_block_appended(now, tip_height(), finalized_height_); });
    if (accounted_supply() != initial_supply_) {
      violation("synchro supply drifted at height " + std::to_string(h));
    }
  }

  void SynchroEngine::reset_from(Height h) {
    ++epoch_;
    work_.erase(work_.lower_bound(h), work_.end());
    next_build_ = h;
    build_height(h);
  }

}  // namespace shardsim::synchro
