/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "shardsim/core/types.hpp"

namespace shardsim::sim {

  /// Invalid scenario or parameter. `field` is a dotted path such as
  /// "params.t_block" (empty when not tied to one field).
  class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string field, const std::string &what)
        : std::runtime_error(field.empty() ? what : field + ": " + what),
          field_(std::move(field)) {}
    const std::string &field() const {
      return field_;
    }

   private:
    std::string field_;
  };

  enum class ProofPolicy { kPerChunk, kPerTransaction };

  std::string_view to_string(ProofPolicy p);
  ProofPolicy parse_proof_policy(std::string_view text);

  struct SimulationParams {
    uint32_t shards = 2;
    VirtualTime t_block{1'000'000};
    VirtualTime t_chunk{500'000};
    VirtualTime t_zk_p{410'000};
    VirtualTime t_zk_v{4'300};
    uint32_t max_txs_per_chunk = 100;
    uint64_t seed = 1;
    VirtualTime duration{60'000'000};
    ProofPolicy proof_policy = ProofPolicy::kPerChunk;
    /// One-way delay on every inter-role message.
    VirtualTime network_latency{0};

    /// Throws ConfigError naming the offending field.
    void validate() const;
  };

  /// Time to prove one chunk holding `tx_count` transactions. Per-transaction
  /// proving charges at least one proof so that empty chunks still carry one.
  VirtualTime proving_cost(ProofPolicy policy, size_t tx_count, VirtualTime t_zk_p);

  /// Producers finish proving within a block interval:
  /// t_chunk + t_zk_p <= t_block.
  bool check_formula_1(VirtualTime t_block, VirtualTime t_chunk,
                       VirtualTime t_zk_p);
  bool check_formula_1(const SimulationParams &p);

  /// A global validator verifies one proof per shard within the time a
  /// producer spends building and proving one chunk:
  /// s * t_zk_v <= t_chunk + t_zk_p.
  VirtualTime formula_2_bound(uint32_t shards, VirtualTime t_zk_v);
  bool check_formula_2(uint32_t shards, VirtualTime t_zk_v, VirtualTime t_chunk,
                       VirtualTime t_zk_p);
  bool check_formula_2(const SimulationParams &p);

  /// Closed-form steady-state throughput for a saturated workload.
  struct ThroughputModel {
    VirtualTime interval;   // time between finalized blocks
    double tps = 0;
    std::string bottleneck;  // "block", "producer" or "validator"
  };

  ThroughputModel model_synchro_throughput(const SimulationParams &p,
                                           size_t txs_per_chunk);
  ThroughputModel model_baseline_throughput(const SimulationParams &p,
                                            size_t txs_per_chunk);

}  // namespace shardsim::sim
