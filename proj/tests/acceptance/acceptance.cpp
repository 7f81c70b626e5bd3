/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

// Acceptance suite: one PASS/FAIL line per criterion. Arguments select
// criteria by number; no arguments runs all of them.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "../support/fixtures.hpp"
#include "shardsim/metrics/cli.hpp"
#include "shardsim/nightshade/chain.hpp"
#include "shardsim/sim/scenario.hpp"
#include "shardsim/synchro/builder.hpp"
#include "shardsim/synchro/producer.hpp"

using namespace shardsim;
namespace fs = std::filesystem;

namespace {
  struct Result {
    bool pass = true;
    std::ostringstream detail;

    // Records one sub-check; failed ones are marked in the detail line.
    void check(bool ok, const std::string &what) {
      pass = pass && ok;
      if (detail.tellp() > 0) detail << "; ";
      if (!ok) detail << "[FAILED] ";
      detail << what;
    }
  };

  using Clock = std::chrono::steady_clock;

  double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }

  std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
  }

  std::string scenario_path(const std::string &name) {
    return (fs::path(SHARDSIM_SCENARIO_DIR) / name).string();
  }

  VirtualTime secs(double s) {
    return seconds_to_virtual(s);
  }

  struct Watcher : sim::ProtocolObserver {
    std::vector<Height> finalized;
    std::map<Digest, std::pair<sim::TxResolution, Height>> resolved;
    std::vector<std::string> violations;
    size_t rollbacks = 0;

    void on_block_finalized(VirtualTime, Height h, const Digest &, size_t) override {
      finalized.push_back(h);
    }
    void on_tx_resolved(VirtualTime, const Digest &tx, sim::TxResolution r,
                        Height h) override {
      resolved[tx] = {r, h};
    }
    void on_rollback(VirtualTime, const sim::RollbackEvent &) override {
      ++rollbacks;
    }
    void on_invariant_violation(VirtualTime, const std::string &w) override {
      violations.push_back(w);
    }
  };

  // A Synchro engine driven by the standard workload, with its internals in
  // reach of the checks.
  struct SynchroRig {
    ledger::ShardMap shards;
    sim::WorkloadGenerator workload;
    std::unique_ptr<synchro::SynchroEngine> engine;
    sim::Scheduler sched;
    Watcher watcher;

    SynchroRig(const sim::SimulationParams &p, const synchro::SynchroConfig &cfg,
               const sim::WorkloadSpec &spec)
        : shards(p.shards), workload(spec, shards, p.seed) {
      std::vector<ledger::LedgerState> genesis;
      for (uint32_t s = 0; s < p.shards; ++s) genesis.emplace_back(ShardId{s}, p.shards);
      workload.fund(genesis);
      engine = std::make_unique<synchro::SynchroEngine>(p, cfg, std::move(genesis));
      engine->add_observer(&watcher);
    }

    void run(VirtualTime end) {
      engine->start(sched);
      workload.start(sched, *engine, end);
      sched.run_until(end);
    }
  };

  sim::SimulationParams byzantine_params(uint64_t seed, int64_t seconds) {
    sim::SimulationParams p;
    p.shards = 4;
    p.seed = seed;
    p.duration = VirtualTime{seconds * 1'000'000};
    return p;
  }

  sim::WorkloadSpec byzantine_workload() {
    sim::WorkloadSpec spec;
    spec.tx_rate = 50;
    spec.accounts = 16;
    return spec;
  }

  bool consecutive_from_one(const std::vector<Height> &hs) {
    for (size_t i = 0; i < hs.size(); ++i) {
      if (hs[i] != i + 1) return false;
    }
    return true;
  }

  // 1: the repeating attack stalls the baseline.
  void baseline_attack(Result &res) {
    auto t0 = Clock::now();
    auto sc = sim::load_scenario(scenario_path("attack.json"));
    auto r = sim::run_scenario(sc, "baseline");
    double wall = since(t0);
    res.check(sc.params.shards == 2 && sc.attack && sc.attack->rounds == 20
                  && sc.baseline.challenge_delay == 1,
              "scenario s=2 rounds=20 challenge_delay=1");
    res.check(r.rollback_count == 20,
              "rollback_count " + std::to_string(r.rollback_count) + " == 20");
    Height progress = r.attack ? r.attack->max_progress_between_rollbacks : 999;
    res.check(r.attack && progress <= sc.baseline.challenge_delay,
              "max finalized progress per round " + std::to_string(progress) + " <= 1");
    res.check(r.attack && r.attack->net_height_progress <= 20,
              "net finalized progress over attack "
                  + std::to_string(r.attack ? r.attack->net_height_progress : 0) + " <= 20");
    res.check(wall < 5.0, "wall " + fixed(wall) + " s < 5 s");
  }

  // 2: same scenario under Synchro.
  void synchro_attack(Result &res) {
    auto t0 = Clock::now();
    auto sc = sim::load_scenario(scenario_path("attack.json"));
    size_t blocks = 0, atomic = 0;
    auto r = sim::run_scenario(sc, "synchro", [&](sim::Protocol &p) {
      auto &e = dynamic_cast<synchro::SynchroEngine &>(p);
      e.on_finalized_block([&](const nightshade::Block &b) {
        ++blocks;
        atomic += synchro::check_atomicity(b, e.shards());
      });
    });
    double wall = since(t0);
    res.check(r.rollback_count == 0,
              "rollback_count " + std::to_string(r.rollback_count) + " == 0");
    bool monotone = true;
    for (size_t i = 1; i < r.series.size(); ++i) {
      monotone = monotone && r.series[i].finalized >= r.series[i - 1].finalized;
    }
    res.check(monotone && r.finalized_height > 0,
              "finalized height monotone up to " + std::to_string(r.finalized_height));
    res.check(blocks > 0 && atomic == blocks && blocks == r.blocks_finalized,
              std::to_string(atomic) + "/" + std::to_string(blocks)
                  + " finalized blocks atomic");
    res.check(r.attack && r.attack->rounds_executed == 20,
              "attack rounds " + std::to_string(r.attack ? r.attack->rounds_executed : 0)
                  + ", excluded " + std::to_string(r.attack ? r.attack->excluded : 0));
    res.check(wall < 5.0, "wall " + fixed(wall) + " s < 5 s");
  }

  // 3: timing formulas and proof cost, exact integer arithmetic.
  void formulas(Result &res) {
    res.check(sim::check_formula_1(secs(1), secs(0.5), secs(0.41)),
              "formula 1 (1, 0.5, 0.41) holds");
    auto bound = sim::formula_2_bound(100, secs(0.0043));
    res.check(bound == VirtualTime{430'000},
              "formula 2 bound " + std::to_string(bound.count()) + " us == 430000 us");
    res.check(sim::check_formula_2(100, secs(0.0043), secs(0.02), secs(0.41)),
              "formula 2 (100, 0.0043, 0.02, 0.41) holds");
    auto cost = sim::proving_cost(sim::ProofPolicy::kPerTransaction, 100, secs(0.41));
    res.check(cost == VirtualTime{41'000'000},
              "per-transaction prove cost for 100 txs " + std::to_string(cost.count())
                  + " us == 41 s");
  }

  // 4: baseline vs Synchro with matching constants.
  void compare(Result &res) {
    auto t0 = Clock::now();
    metrics::CliOptions o;
    o.scenario = scenario_path("compare_s100.json");
    auto out_dir = fs::temp_directory_path() / "shardsim_acceptance_compare";
    fs::remove_all(out_dir);
    o.out = out_dir.string();
    std::ostringstream out, err;
    int code = metrics::cli_compare(o, out, err);
    double wall = since(t0);
    res.check(code == metrics::kExitOk, "cli_compare exit " + std::to_string(code));
    if (code != metrics::kExitOk) {
      res.check(false, err.str());
      return;
    }
    std::ifstream in(out_dir / "compare.json");
    auto j = nlohmann::json::parse(in);
    auto sc = sim::load_scenario(o.scenario);
    res.check(sc.params.shards == 100 && j["formula_1"].get<bool>()
                  && j["formula_2"].get<bool>(),
              "s=100, both formulas hold");
    double duration = virtual_to_seconds(sc.params.duration);
    res.check(duration >= 300, "virtual duration " + fixed(duration, 0) + " s >= 300 s");
    double base = j["baseline_steady_state_tps"].get<double>();
    double syn = j["synchro_steady_state_tps"].get<double>();
    double ratio = j["steady_state_ratio"].get<double>();
    res.check(base > 0 && std::abs(ratio - 1.0) <= 0.01,
              "steady TPS synchro " + fixed(syn) + " vs baseline " + fixed(base)
                  + ", ratio " + fixed(ratio, 4));
    res.check(wall < 30.0, "wall " + fixed(wall) + " s < 30 s");
  }

  // 5: a thousand shards at full chunks.
  void scale(Result &res) {
    auto t0 = Clock::now();
    auto sc = sim::load_scenario(scenario_path("scale_1000.json"));
    res.check(sc.params.shards == 1000 && sc.params.max_txs_per_chunk == 100
                  && sc.params.proof_policy == sim::ProofPolicy::kPerChunk
                  && sc.params.network_latency == VirtualTime{0}
                  && sc.protocol == "synchro",
              "s=1000, 100 tx/chunk, per-chunk proofs, zero latency");
    auto model = sim::model_synchro_throughput(sc.params, sc.params.max_txs_per_chunk);
    res.check(model.tps == 100000.0, "closed-form model " + fixed(model.tps) + " TPS");
    auto r = sim::run_scenario(sc);
    double wall = since(t0);
    res.check(std::abs(r.steady_state_tps - 100000.0) <= 1000.0,
              "steady TPS " + fixed(r.steady_state_tps) + " within 1% of 100000");
    res.check(r.rollback_count == 0 && r.invariant_violations.empty(),
              "no rollbacks or violations");
    res.check(wall < 60.0, "wall " + fixed(wall) + " s < 60 s");
  }

  // 6a: one coordinator censors a user; the others carry the user's
  // transactions.
  void censorship(Result &res) {
    auto p = byzantine_params(11, 30);
    synchro::SynchroConfig cfg;
    cfg.coordinators = 3;
    cfg.producers_per_shard = 3;
    SynchroRig rig(p, cfg, byzantine_workload());
    auto target = rig.workload.accounts().front();
    rig.engine->inject_fault(RoleId::coordinator(0), {sim::FaultKind::kIgnoreUser, target});
    std::map<Digest, Height> due;  // next height to be built at submission
    auto cutoff = p.duration - secs(5);
    rig.workload.on_submit([&](VirtualTime t, const ledger::TxPtr &tx) {
      if (tx->sender == target && t < cutoff) due[tx->id] = rig.engine->next_build_height();
    });
    rig.run(p.duration);
    size_t late = 0, missing = 0;
    Height worst = 0;
    for (const auto &[id, h] : due) {
      auto it = rig.watcher.resolved.find(id);
      if (it == rig.watcher.resolved.end()
          || it->second.first != sim::TxResolution::kFinalized) {
        ++missing;
        continue;
      }
      auto delay = it->second.second - h;
      worst = std::max(worst, delay);
      late += delay >= 3;
    }
    const auto &trust = rig.engine->trust();
    res.check(due.size() >= 20 && missing == 0 && late == 0,
              "6a: " + std::to_string(due.size()) + " censored-user txs finalized, worst "
                  + std::to_string(worst + 1) + " block(s) after arrival (<= 3)");
    res.check(trust.score(RoleId::coordinator(0)) < trust.score(RoleId::coordinator(1)),
              "6a: censoring coordinator trails in trust");
  }

  // 6b: all but one producer per shard return malformed chunks.
  void malformed_producers(Result &res) {
    auto p = byzantine_params(12, 30);
    synchro::SynchroConfig cfg;
    cfg.producers_per_shard = 3;
    SynchroRig honest(p, cfg, byzantine_workload());
    honest.run(p.duration);
    SynchroRig rig(p, cfg, byzantine_workload());
    for (uint32_t s = 0; s < p.shards; ++s) {
      for (uint32_t j = 0; j + 1 < cfg.producers_per_shard; ++j) {
        rig.engine->inject_fault(RoleId::producer(ShardId{s}, j),
                                 {sim::FaultKind::kMalformedChunks, {}});
      }
    }
    rig.run(p.duration);
    const auto &hs = rig.watcher.finalized;
    res.check(consecutive_from_one(hs) && rig.engine->failures().empty()
                  && rig.engine->finalized_height() == honest.engine->finalized_height()
                  && !hs.empty(),
              "6b: heights 1.." + std::to_string(rig.engine->finalized_height())
                  + " all finalized, as in the honest run ("
                  + std::to_string(honest.engine->finalized_height()) + ")");
  }

  // 6c: one of four global validators finalizes bad combinations.
  void bad_validator(Result &res) {
    size_t honest = 0, forks = 0;
    for (uint64_t seed = 1; seed <= 50; ++seed) {
      auto p = byzantine_params(seed, 10);
      synchro::SynchroConfig cfg;
      cfg.global_validators = 4;
      SynchroRig rig(p, cfg, byzantine_workload());
      rig.engine->inject_fault(RoleId::global_validator(3),
                               {sim::FaultKind::kBadCombinations, {}});
      bool atomic = true;
      rig.engine->on_finalized_block([&](const nightshade::Block &b) {
        atomic = atomic && synchro::check_atomicity(b, rig.shards);
      });
      rig.run(p.duration);
      const auto &tree = rig.engine->tree();
      forks += tree.leaves().size() > 1;
      honest += tree.best_tip() == rig.engine->finalized_hash() && atomic
             && rig.engine->rollback_count() == 0 && rig.watcher.violations.empty()
             && rig.engine->finalized_height() > 0;
    }
    res.check(honest == 50,
              "6c: fork choice kept the honest chain in " + std::to_string(honest)
                  + "/50 seeds");
    res.check(forks == 50, "6c: Byzantine fork present in " + std::to_string(forks)
                               + "/50 seeds");
  }

  void byzantine(Result &res) {
    auto t0 = Clock::now();
    censorship(res);
    malformed_producers(res);
    bad_validator(res);
    res.check(true, "wall " + fixed(since(t0)) + " s");
  }

  // 7a: random transactions over four shards never change the supply.
  void conservation(Result &res) {
    ledger::ShardMap shards(4);
    std::vector<ledger::LedgerState> states;
    for (uint32_t s = 0; s < 4; ++s) states.emplace_back(ShardId{s}, 4);
    std::vector<AccountId> accounts;
    for (int i = 0; i < 12; ++i) {
      AccountId a{"acct-" + std::to_string(i)};
      states[shards.of(a).value].create_account(a, near(5));
      accounts.push_back(a);
    }
    auto balances = [&] {
      Yocto t;
      for (const auto &s : states) t += s.total_balance();
      return t;
    };
    const Yocto supply = balances();
    Yocto burned, stranded;
    std::vector<ledger::Receipt> pending;
    std::mt19937_64 rng(2024);
    size_t drift = 0, cross = 0, reverted = 0;
    auto deliver = [&] {
      std::shuffle(pending.begin(), pending.end(), rng);
      for (const auto &r : pending) {
        auto out = ledger::execute_receipt(states[r.target_shard.value], r, {});
        if (!out.applied()) stranded += ledger::receipt_value(r);
      }
      pending.clear();
    };
    for (uint64_t i = 0; i < 10'000; ++i) {
      auto &from = accounts[rng() % accounts.size()];
      auto &to = accounts[rng() % accounts.size()];
      if (from == to) continue;
      auto tx = ledger::Transaction::make(from, to, milli_near(rng() % 3000),
                                          milli_near(1 + rng() % 3), i);
      auto out = ledger::execute_transaction(states[shards.of(from).value], tx, shards, {});
      burned += out.gas_burned;
      reverted += !out.applied();
      if (out.emitted_receipt) {
        ++cross;
        pending.push_back(*out.emitted_receipt);
      }
      if (rng() % 7 == 0) deliver();
      Yocto in_flight;
      for (const auto &r : pending) in_flight += ledger::receipt_value(r);
      drift += balances() + burned + in_flight + stranded != supply;
    }
    deliver();
    drift += balances() + burned + stranded != supply;
    res.check(drift == 0, "7a: ledger drift 0 over 10000 random txs (" + std::to_string(cross)
                              + " cross-shard, " + std::to_string(reverted) + " reverted)");

    sim::Scenario sc;
    sc.name = "conservation";
    sc.params.shards = 4;
    sc.params.duration = secs(20);
    sc.workload.tx_rate = 500;
    sc.workload.arrival = sim::Arrival::kUniform;
    sc.workload.accounts = 16;
    for (const char *protocol : {"baseline", "synchro"}) {
      auto r = sim::run_scenario(sc, protocol);
      res.check(r.submitted_txs == 10'000 && r.initial_supply == r.final_supply
                    && r.invariant_violations.empty() && r.finalized_txs > 0,
                std::string("7a: ") + protocol + " supply unchanged over "
                    + std::to_string(r.submitted_txs) + " txs");
    }
  }

  // 7b: a rollback restores exactly the prefix it cuts back to.
  void rollback_exactness(Result &res) {
    const std::vector<std::string> names{"alice", "bob", "carol", "dave", "erin", "frank"};
    ledger::ShardMap shards(2);
    size_t exact = 0;
    for (uint64_t trial = 0; trial < 100; ++trial) {
      std::mt19937_64 rng(trial + 1);
      std::vector<std::pair<std::string, Yocto>> funded;
      for (const auto &n : names) funded.push_back({n, near(1 + rng() % 10)});
      auto genesis = fixtures::make_genesis(2, funded);
      attack::AttackPlan plan;
      attack::deploy_attack_contract(plan, genesis, shards);
      nightshade::ChainView chain(std::move(genesis), shards);
      nightshade::Mempool pool(shards);
      uint64_t nonce = 0;
      auto traffic = [&] {
        for (uint64_t k = rng() % 7; k > 0; --k) {
          auto from = names[rng() % names.size()];
          auto to = names[rng() % names.size()];
          if (from != to) pool.add(fixtures::transfer(from, to, milli_near(rng() % 3000), nonce++));
        }
      };
      Height prefix = 1 + rng() % 8;
      for (Height h = 0; h < prefix; ++h) {
        traffic();
        nightshade::produce_block(chain, pool, 1, 100);
      }
      auto states = chain.states();
      auto tip_hash = chain.tip().block_hash;
      auto burned = chain.burned();
      auto in_flight = chain.in_flight();
      auto supply = chain.accounted_supply();

      pool.add(fixtures::call("attacker", "contract", plan.deposit, nonce++));
      traffic();
      nightshade::produce_block(chain, pool, 1, 100);
      traffic();
      nightshade::produce_block(chain, pool, 1, 100);
      auto challenge = nightshade::detect_inconsistency(chain);
      if (!challenge || challenge->block_height != prefix + 1) continue;
      nightshade::rollback(chain, *challenge, {.refund_gas = true});
      exact += chain.tip_height() == prefix && chain.tip().block_hash == tip_hash
            && chain.states() == states && chain.burned() == burned
            && chain.in_flight() == in_flight && chain.accounted_supply() == supply;
    }
    res.check(exact == 100,
              "7b: rollback restored " + std::to_string(exact) + "/100 random prefixes");
  }

  // 7c: same seed, same bytes.
  void replay(Result &res) {
    auto byz = sim::load_scenario(scenario_path("byzantine.json"), {"params.duration=10"});
    auto atk = sim::load_scenario(scenario_path("attack.json"), {"params.duration=20"});
    size_t identical = 0;
    std::set<std::string> distinct;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      bool same = true;
      for (auto *sc : {&byz, &atk}) {
        sc->params.seed = seed;
        auto a = metrics::render_json(sim::run_scenario(*sc));
        auto b = metrics::render_json(sim::run_scenario(*sc));
        same = same && a == b;
        if (sc == &byz) distinct.insert(a);
      }
      identical += same;
    }
    res.check(identical == 20 && distinct.size() == 20,
              "7c: " + std::to_string(identical) + "/20 seeds replay byte-identically ("
                  + std::to_string(distinct.size()) + " distinct reports)");
  }

  // 7d: flipping any single bit of a proven chunk or its proof breaks it.
  void mutation_soundness(Result &res) {
    ledger::ShardMap shards(2);
    auto genesis = fixtures::make_genesis(
        2, {{"alice", near(10)}, {"bob", near(10)}, {"carol", near(10)}});
    std::vector<ledger::TxPtr> txs{fixtures::transfer("alice", "bob", near(1), 1),
                                   fixtures::transfer("bob", "carol", near(2), 1),
                                   fixtures::transfer("carol", "alice", near(3), 1),
                                   fixtures::transfer("bob", "alice", near(1), 2)};
    auto parent = nightshade::genesis_block(2, genesis);
    auto built = synchro::coordinator_build_block(RoleId::coordinator(0),
                                                  synchro::source_from(txs, shards), 1,
                                                  parent.block_hash, genesis, shards, {});
    auto chunk = built.candidate.block.chunks[1];
    auto prover = RoleId::producer(ShardId{1}, 0);
    auto verdict = synchro::producer_verify_chunk(chunk, ShardId{1}, genesis[1], shards, {});
    synchro::ProofSystem sys;
    auto proof = synchro::producer_make_proof(chunk, verdict, prover, {}, sys);
    auto bytes = nightshade::encode_chunk(chunk);
    bool baseline_ok = sys.verify(proof, nightshade::decode_chunk(bytes))
                    && !chunk.txs.empty() && !chunk.receipts.empty();

    std::vector<Digest *> fields{&proof.chunk_digest, &proof.pre_state_root,
                                 &proof.post_state_root, &proof.attestation};
    const size_t chunk_bits = bytes.size() * 8;
    const size_t total_bits = chunk_bits + fields.size() * 256;
    std::mt19937_64 rng(99);
    size_t rejected = 0;
    for (int i = 0; i < 1000; ++i) {
      size_t bit = rng() % total_bits;
      bool accepted = false;
      if (bit < chunk_bits) {
        auto m = bytes;
        m[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        try {
          accepted = sys.verify(proof, nightshade::decode_chunk(m));
        } catch (const std::exception &) {
        }
      } else {
        bit -= chunk_bits;
        auto p = proof;
        std::vector<Digest *> pf{&p.chunk_digest, &p.pre_state_root, &p.post_state_root,
                                 &p.attestation};
        auto &d = *pf[bit / 256];
        d.bytes[(bit % 256) / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        accepted = sys.verify(p, chunk);
      }
      rejected += !accepted;
    }
    res.check(baseline_ok && rejected == 1000,
              "7d: " + std::to_string(rejected) + "/1000 single-bit mutations rejected");
  }

  void properties(Result &res) {
    auto t0 = Clock::now();
    conservation(res);
    rollback_exactness(res);
    replay(res);
    mutation_soundness(res);
    res.check(true, "wall " + fixed(since(t0)) + " s");
  }

  struct Criterion {
    int id;
    const char *title;
    std::function<void(Result &)> run;
  };
}  // namespace

int main(int argc, char **argv) {
  const std::vector<Criterion> criteria{
      {1, "baseline attack rolls back every round", baseline_attack},
      {2, "synchro under the same attack", synchro_attack},
      {3, "formula arithmetic", formulas},
      {4, "compare: synchro matches baseline throughput", compare},
      {5, "1000 shards reach 100000 TPS", scale},
      {6, "Byzantine roles", byzantine},
      {7, "property suites", properties},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto &c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    Result res;
    try {
      c.run(res);
    } catch (const std::exception &e) {
      res.check(false, std::string("exception: ") + e.what());
    }
    failed += !res.pass;
    std::printf("%s %d %s: %s\n", res.pass ? "PASS" : "FAIL", c.id, c.title,
                res.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
