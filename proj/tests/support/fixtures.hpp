/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "shardsim/core/ledger.hpp"

namespace shardsim::fixtures {

  /// With 2 shards: alice, attacker -> shard 0; bob, carol, contract -> 1.
  inline std::vector<ledger::LedgerState> make_genesis(
      uint32_t shard_count,
      const std::vector<std::pair<std::string, Yocto>> &accounts) {
    std::vector<ledger::LedgerState> states;
    for (uint32_t s = 0; s < shard_count; ++s) states.emplace_back(ShardId{s}, shard_count);
    for (const auto &[name, bal] : accounts) {
      AccountId id{name};
      states[ledger::shard_of(id, shard_count).value].create_account(id, bal);
    }
    return states;
  }

  inline ledger::TxPtr transfer(const std::string &from, const std::string &to,
                                Yocto amount, uint64_t nonce,
                                Yocto gas = milli_near(1)) {
    return std::make_shared<const ledger::Transaction>(
        ledger::Transaction::make({from}, {to}, amount, gas, nonce));
  }

  inline ledger::TxPtr call(const std::string &from, const std::string &contract,
                            Yocto deposit, uint64_t nonce,
                            Yocto gas = milli_near(1)) {
    return std::make_shared<const ledger::Transaction>(ledger::Transaction::make(
        {from}, {contract}, deposit, gas, nonce, ledger::TxKind::kContractCall,
        "deposit"));
  }

}  // namespace shardsim::fixtures
