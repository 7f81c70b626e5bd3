/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/sim/params.hpp"

#include <algorithm>

namespace shardsim::sim {

  std::string_view to_string(ProofPolicy p) {
    return p == ProofPolicy::kPerChunk ? "per_chunk" : "per_transaction";
  }

  ProofPolicy parse_proof_policy(std::string_view text) {
    if (text == "per_chunk" || text == "PerChunk") return ProofPolicy::kPerChunk;
    if (text == "per_transaction" || text == "PerTransaction") {
      return ProofPolicy::kPerTransaction;
    }
    throw ConfigError("params.proof_policy",
                      "expected per_chunk or per_transaction, got '"
                          + std::string(text) + "'");
  }

  void SimulationParams::validate() const {
    auto positive = [](VirtualTime t, const char *field) {
      if (t.count() <= 0) {
        throw ConfigError(std::string("params.") + field, "must be > 0");
      }
    };
    if (shards < 1) throw ConfigError("params.shards", "must be >= 1");
    positive(t_block, "t_block");
    positive(t_chunk, "t_chunk");
    positive(t_zk_p, "t_zk_p");
    positive(t_zk_v, "t_zk_v");
    if (duration.count() < 0) throw ConfigError("params.duration", "must be >= 0");
    if (max_txs_per_chunk < 1) {
      throw ConfigError("params.max_txs_per_chunk", "must be >= 1");
    }
    if (network_latency.count() < 0) {
      throw ConfigError("params.network_latency", "must be >= 0");
    }
  }

  VirtualTime proving_cost(ProofPolicy policy, size_t tx_count,
                           VirtualTime t_zk_p) {
    if (policy == ProofPolicy::kPerChunk) return t_zk_p;
    auto n = static_cast<VirtualTime::rep>(std::max<size_t>(1, tx_count));
    return t_zk_p * n;
  }

  bool check_formula_1(VirtualTime t_block, VirtualTime t_chunk,
                       VirtualTime t_zk_p) {
    return t_chunk + t_zk_p <= t_block;
  }

  bool check_formula_1(const SimulationParams &p) {
    return check_formula_1(p.t_block, p.t_chunk, p.t_zk_p);
  }

  VirtualTime formula_2_bound(uint32_t shards, VirtualTime t_zk_v) {
    return t_zk_v * static_cast<VirtualTime::rep>(shards);
  }

  bool check_formula_2(uint32_t shards, VirtualTime t_zk_v, VirtualTime t_chunk,
                       VirtualTime t_zk_p) {
    return formula_2_bound(shards, t_zk_v) <= t_chunk + t_zk_p;
  }

  bool check_formula_2(const SimulationParams &p) {
    return check_formula_2(p.shards, p.t_zk_v, p.t_chunk, p.t_zk_p);
  }

  namespace {
    double tps_for(const SimulationParams &p, size_t txs_per_chunk,
                   VirtualTime interval) {
      return static_cast<double>(p.shards) * static_cast<double>(txs_per_chunk)
           / virtual_to_seconds(interval);
    }
  }  // namespace

  ThroughputModel model_synchro_throughput(const SimulationParams &p,
                                           size_t txs_per_chunk) {
    auto producer = p.t_chunk + proving_cost(p.proof_policy, txs_per_chunk, p.t_zk_p);
    auto verify = formula_2_bound(p.shards, p.t_zk_v);
    ThroughputModel m{p.t_block, 0, "block"};
    if (producer > m.interval) m = {producer, 0, "producer"};
    if (verify > m.interval) m = {verify, 0, "validator"};
    m.tps = tps_for(p, txs_per_chunk, m.interval);
    return m;
  }

  ThroughputModel model_baseline_throughput(const SimulationParams &p,
                                            size_t txs_per_chunk) {
    ThroughputModel m{p.t_block, 0, "block"};
    m.tps = tps_for(p, txs_per_chunk, m.interval);
    return m;
  }

}  // namespace shardsim::sim
