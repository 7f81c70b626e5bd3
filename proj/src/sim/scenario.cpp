/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/sim/scenario.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "shardsim/metrics/collector.hpp"

namespace shardsim::sim {

  using nlohmann::json;

  namespace {
    // Reads fields of one JSON object and rejects any key it was not asked about.
    class Section {
     public:
      Section(const json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
      }

      ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto &[key, v] : j_.items()) {
          if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
        }
      }

      std::string field(const std::string &key) const {
        return path_.empty() ? key : path_ + "." + key;
      }

      const json *find(const std::string &key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
      }

      template <typename T>
      void read(const std::string &key, T &out) {
        if (const auto *v = find(key)) {
          try {
            out = v->get<T>();
          } catch (const json::exception &) {
            throw ConfigError(field(key), "wrong type: " + std::string(v->type_name()));
          }
        }
      }

      void unsigned_int(const std::string &key, uint32_t &out) {
        if (const auto *v = find(key)) {
          if (!v->is_number_integer() || v->get<int64_t>() < 0
              || v->get<int64_t>() > UINT32_MAX) {
            throw ConfigError(field(key), "expected a non-negative integer");
          }
          out = v->get<uint32_t>();
        }
      }

      void seconds(const std::string &key, VirtualTime &out) {
        if (const auto *v = find(key)) {
          if (!v->is_number()) throw ConfigError(field(key), "expected seconds as a number");
          double s = v->get<double>();
          if (!std::isfinite(s)) throw ConfigError(field(key), "not finite");
          out = VirtualTime{std::llround(s * 1e6)};
        }
      }

      void amount(const std::string &key, Yocto &out) {
        if (const auto *v = find(key)) {
          try {
            if (v->is_number_unsigned()) {
              out = Yocto{v->get<uint64_t>()};
            } else {
              out = Yocto::parse(v->get<std::string>());
            }
          } catch (const std::exception &e) {
            throw ConfigError(field(key), std::string("bad amount: ") + e.what());
          }
        }
      }

      template <typename Fn>
      void text(const std::string &key, Fn &&apply) {
        if (const auto *v = find(key)) {
          if (!v->is_string()) throw ConfigError(field(key), "expected a string");
          try {
            apply(v->get<std::string>());
          } catch (const ConfigError &e) {
            throw ConfigError(field(key), e.what());
          } catch (const std::invalid_argument &e) {
            throw ConfigError(field(key), e.what());
          }
        }
      }

     private:
      const json &j_;
      std::string path_;
      std::set<std::string> seen_;
    };

    void read_params(Section &s, SimulationParams &p) {
      s.unsigned_int("shards", p.shards);
      s.seconds("t_block", p.t_block);
      s.seconds("t_chunk", p.t_chunk);
      s.seconds("t_zk_p", p.t_zk_p);
      s.seconds("t_zk_v", p.t_zk_v);
      s.unsigned_int("max_txs_per_chunk", p.max_txs_per_chunk);
      s.read("seed", p.seed);
      s.seconds("duration", p.duration);
      s.text("proof_policy", [&](const std::string &t) { p.proof_policy = parse_proof_policy(t); });
      s.seconds("network_latency", p.network_latency);
    }

    void read_workload(Section &s, WorkloadSpec &w) {
      s.read("tx_rate", w.tx_rate);
      s.read("cstx_fraction", w.cstx_fraction);
      s.unsigned_int("accounts", w.accounts);
      s.amount("initial_balance", w.initial_balance);
      s.amount("amount", w.amount);
      s.amount("gas", w.gas);
      s.text("arrival", [&](const std::string &t) { w.arrival = parse_arrival(t); });
    }

    void read_attack(Section &s, attack::AttackPlan &a) {
      s.text("attacker", [&](const std::string &t) { a.attacker = AccountId{t}; });
      s.text("contract", [&](const std::string &t) { a.contract_account = AccountId{t}; });
      s.amount("deposit", a.deposit);
      s.unsigned_int("rounds", a.rounds);
      s.seconds("inter_round_delay", a.inter_round_delay);
      s.seconds("start_at", a.start_at);
      s.amount("gas", a.gas);
      s.amount("threshold", a.threshold);
      s.amount("contract_prefund", a.contract_prefund);
      s.amount("attacker_balance", a.attacker_balance);
    }
  }  // namespace

  void Scenario::validate() const {
    params.validate();
    workload.validate(params.shards);
    if (protocol != "synchro" && protocol != "baseline") {
      throw ConfigError("protocol", "expected synchro or baseline, got '" + protocol + "'");
    }
    if (baseline.producers_per_shard < 1) {
      throw ConfigError("baseline.producers_per_shard", "must be >= 1");
    }
    synchro.validate();
    if (attack) attack->validate(params.shards);
  }

  Scenario parse_scenario(const json &j) {
    Scenario sc;
    Section top(j, "");
    top.read("name", sc.name);
    top.read("protocol", sc.protocol);
    if (const auto *p = top.find("params")) {
      Section s(*p, "params");
      read_params(s, sc.params);
    }
    if (const auto *w = top.find("workload")) {
      Section s(*w, "workload");
      read_workload(s, sc.workload);
    }
    if (const auto *b = top.find("baseline")) {
      Section s(*b, "baseline");
      s.unsigned_int("challenge_delay", sc.baseline.challenge_delay);
      s.read("refund_gas", sc.baseline.refund_gas);
      s.read("blacklist_offenders", sc.baseline.blacklist_offenders);
      s.unsigned_int("producers_per_shard", sc.baseline.producers_per_shard);
    }
    if (const auto *y = top.find("synchro")) {
      Section s(*y, "synchro");
      s.unsigned_int("coordinators", sc.synchro.coordinators);
      s.unsigned_int("producers_per_shard", sc.synchro.producers_per_shard);
      s.unsigned_int("global_validators", sc.synchro.global_validators);
      s.unsigned_int("pipeline_depth", sc.synchro.pipeline_depth);
      s.read("reward_per_block", sc.synchro.reward_per_block);
      s.read("unsound_proofs", sc.synchro.unsound_proofs);
    }
    if (const auto *e = top.find("execution")) {
      Section s(*e, "execution");
      s.text("attack_assert_polarity", [&](const std::string &t) {
        if (t == "prose") {
          sc.execution.polarity = ledger::AssertPolarity::kProse;
        } else if (t == "literal") {
          sc.execution.polarity = ledger::AssertPolarity::kLiteral;
        } else {
          throw std::invalid_argument("expected prose or literal");
        }
      });
    }
    if (const auto *f = top.find("faults")) {
      if (!f->is_array()) throw ConfigError("faults", "expected an array");
      for (size_t i = 0; i < f->size(); ++i) {
        Section s((*f)[i], "faults." + std::to_string(i));
        FaultSpec spec;
        if (!s.find("role") || !s.find("kind")) {
          throw ConfigError(s.field("role"), "role and kind are required");
        }
        s.text("role", [&](const std::string &t) { spec.role = RoleId::parse(t); });
        s.text("kind", [&](const std::string &t) { spec.behavior.kind = parse_fault_kind(t); });
        s.text("target", [&](const std::string &t) { spec.behavior.target = AccountId{t}; });
        if (spec.behavior.kind == FaultKind::kIgnoreUser && spec.behavior.target.name.empty()) {
          throw ConfigError(s.field("target"), "ignore_user needs a target account");
        }
        sc.faults.push_back(std::move(spec));
      }
    }
    if (const auto *a = top.find("attack")) {
      if (!a->is_null()) {
        Section s(*a, "attack");
        attack::AttackPlan plan;
        read_attack(s, plan);
        sc.attack = plan;
      }
    }
    sc.validate();
    return sc;
  }

  void apply_override(json &j, std::string_view assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError(std::string(assignment), "override must look like key.path=value");
    }
    std::string path(assignment.substr(0, eq));
    std::string raw(assignment.substr(eq + 1));
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error &) {
      value = raw;
    }
    json *node = &j;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (size_t i = 0; i < parts.size(); ++i) {
      const auto &key = parts[i];
      if (key.empty()) throw ConfigError(path, "empty path component");
      bool last = i + 1 == parts.size();
      if (node->is_array()) {
        size_t idx = 0;
        try {
          idx = std::stoul(key);
        } catch (const std::exception &) {
          throw ConfigError(path, "'" + key + "' is not an array index");
        }
        if (idx >= node->size()) throw ConfigError(path, "index out of range");
        node = &(*node)[idx];
      } else {
        if (node->is_null()) *node = json::object();
        if (!node->is_object()) throw ConfigError(path, "'" + key + "' is inside a scalar");
        node = &(*node)[key];
      }
      if (last) *node = value;
    }
  }

  json load_scenario_json(const std::string &path, const std::vector<std::string> &overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario", "cannot open " + path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error &e) {
      throw ConfigError("scenario", path + ": " + e.what());
    }
    if (const char *seed = std::getenv("SHARDSIM_SEED"); seed && *seed) {
      char *end = nullptr;
      errno = 0;
      auto v = std::strtoull(seed, &end, 10);
      if (*end != '\0' || errno != 0) {
        throw ConfigError("SHARDSIM_SEED", "not an unsigned integer: " + std::string(seed));
      }
      j["params"]["seed"] = v;
    }
    for (const auto &o : overrides) apply_override(j, o);
    return j;
  }

  Scenario load_scenario(const std::string &path, const std::vector<std::string> &overrides) {
    return parse_scenario(load_scenario_json(path, overrides));
  }

  metrics::MetricsReport run_scenario(const Scenario &scenario) {
    return run_scenario(scenario, scenario.protocol);
  }

  metrics::MetricsReport run_scenario(const Scenario &sc, std::string_view protocol,
                                      const ProtocolSetup &setup) {
    sc.validate();
    const auto &p = sc.params;
    ledger::ShardMap shards(p.shards);
    std::vector<ledger::LedgerState> genesis;
    for (uint32_t s = 0; s < p.shards; ++s) genesis.emplace_back(ShardId{s}, p.shards);
    WorkloadGenerator workload(sc.workload, shards, p.seed);
    workload.fund(genesis);
    if (sc.attack) attack::deploy_attack_contract(*sc.attack, genesis, shards);

    std::unique_ptr<Protocol> engine;
    synchro::SynchroEngine *synchro_engine = nullptr;
    if (protocol == "baseline") {
      engine = std::make_unique<nightshade::NightshadeEngine>(p, sc.baseline, std::move(genesis),
                                                              sc.execution);
    } else if (protocol == "synchro") {
      auto e = std::make_unique<synchro::SynchroEngine>(p, sc.synchro, std::move(genesis),
                                                        sc.execution);
      synchro_engine = e.get();
      engine = std::move(e);
    } else {
      throw ConfigError("protocol", "expected synchro or baseline, got '"
                                        + std::string(protocol) + "'");
    }
    for (size_t i = 0; i < sc.faults.size(); ++i) {
      try {
        engine->inject_fault(sc.faults[i].role, sc.faults[i].behavior);
      } catch (const FaultError &e) {
        throw ConfigError("faults." + std::to_string(i), e.what());
      }
    }

    if (setup) setup(*engine);

    Scheduler scheduler;
    metrics::MetricsCollector collector(p.t_block);
    engine->add_observer(&collector);
    workload.on_submit([&](VirtualTime t, const ledger::TxPtr &tx) {
      collector.on_submit(t, tx->id);
    });
    std::optional<attack::AttackDriver> driver;
    if (sc.attack) {
      driver.emplace(*sc.attack, *engine, scheduler);
      engine->add_observer(&*driver);
    }

    metrics::MetricsReport report;
    report.initial_supply = engine->accounted_supply();
    engine->start(scheduler);
    workload.start(scheduler, *engine, p.duration);
    if (driver && p.duration.count() > 0) driver->start();
    scheduler.run_until(p.duration);

    report.scenario = sc.name;
    report.protocol = std::string(protocol);
    report.seed = p.seed;
    report.shards = p.shards;
    report.duration = p.duration;
    report.t_block = p.t_block;
    report.network_latency = p.network_latency;
    report.proof_policy = std::string(to_string(p.proof_policy));
    report.formula_1 = check_formula_1(p);
    report.formula_2 = check_formula_2(p);
    collector.finish(report, p.duration);
    report.final_supply = engine->accounted_supply();
    report.rewards = engine->rewards();
    if (synchro_engine) {
      report.validator_failures = synchro_engine->failures().size();
      report.rollback_count += synchro_engine->rollback_count();
    }
    if (report.final_supply != report.initial_supply && report.invariant_violations.empty()) {
      report.invariant_violations.push_back("supply drifted over the run");
    }
    if (driver) {
      auto a = driver->report();
      report.attack = metrics::AttackSummary{a.rounds_executed,
                                             a.rollbacks_caused,
                                             a.excluded,
                                             a.net_height_progress,
                                             a.max_progress_between_rollbacks,
                                             a.attacker_cost};
    }
    return report;
  }

}  // namespace shardsim::sim
