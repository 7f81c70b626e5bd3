/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "shardsim/core/hash.hpp"
#include "shardsim/core/types.hpp"

namespace shardsim::ledger {

  /// Deterministic static assignment: the 256-bit big-endian integer
  /// sha256(name) reduced mod `shard_count`.
  ShardId shard_of(const AccountId &account, uint32_t shard_count);

  /// Memoising wrapper around shard_of for one shard count.
  class ShardMap {
   public:
    explicit ShardMap(uint32_t shard_count);

    uint32_t shard_count() const {
      return shard_count_;
    }
    ShardId of(const AccountId &account) const;

   private:
    uint32_t shard_count_;
    mutable std::unordered_map<std::string, ShardId> cache_;
  };

  class LedgerError : public std::runtime_error {
   public:
    enum class Code {
      kUnknownAccount,
      kUnknownReceiptTarget,
      kAccountTaken,
      kWrongShard,
      kNotCrossShard,
      kCrossShard,
      kInvalidTransaction,
      kInsufficientBalance,
    };

    LedgerError(Code code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    Code code() const {
      return code_;
    }

   private:
    Code code_;
  };

  /// Which reading of the attack contract's guard to evaluate.
  ///   kProse:   reject when balance + deposit >  threshold
  ///   kLiteral: reject when balance + deposit <= threshold (the assert! form)
  enum class AssertPolarity { kProse, kLiteral };

  struct AttackContract {
    Yocto threshold;
    bool operator==(const AttackContract &) const = default;
  };
  struct SimpleVault {
    bool operator==(const SimpleVault &) const = default;
  };
  using ContractKind = std::variant<AttackContract, SimpleVault>;

  struct Account {
    Yocto balance;
    std::optional<ContractKind> contract;
    bool operator==(const Account &) const = default;
  };

  /// World state of a single shard.
  class LedgerState {
   public:
    LedgerState(ShardId shard, uint32_t shard_count);

    ShardId shard() const {
      return shard_;
    }
    uint32_t shard_count() const {
      return shard_count_;
    }

    const std::map<AccountId, Account> &accounts() const {
      return accounts_;
    }
    const Account *find(const AccountId &id) const;
    Yocto balance(const AccountId &id) const;  // zero when absent

    /// Throws kAccountTaken if present, kWrongShard if the account hashes to
    /// another shard.
    void create_account(const AccountId &id, Yocto balance,
                        std::optional<ContractKind> contract = std::nullopt);
    void credit(const AccountId &id, Yocto amount);
    /// Throws kInsufficientBalance / kUnknownAccount.
    void debit(const AccountId &id, Yocto amount);

    Yocto total_balance() const;

    /// Cached; invalidated by every mutation.
    const Digest &state_root() const;

    bool operator==(const LedgerState &o) const {
      return shard_ == o.shard_ && accounts_ == o.accounts_;
    }

   private:
    Account &ensure(const AccountId &id);

    ShardId shard_;
    uint32_t shard_count_;
    std::map<AccountId, Account> accounts_;
    mutable std::optional<Digest> root_;
  };

  /// Recomputes from contents: sha256 over the canonical encoding (accounts
  /// in lexicographic order, length-prefixed names, big-endian integers).
  /// The shard index is not part of the encoding.
  Digest compute_state_root(const LedgerState &state);

  enum class TxKind : uint8_t { kTransfer = 0, kContractCall = 1 };

  struct Transaction {
    Digest id;
    AccountId sender;
    AccountId receiver;
    Yocto amount;
    TxKind kind = TxKind::kTransfer;
    std::string function;  // non-empty only for contract calls
    Yocto gas;
    uint64_t nonce = 0;

    /// Validates (gas > 0, non-empty accounts) and computes the id.
    static Transaction make(AccountId sender, AccountId receiver, Yocto amount,
                            Yocto gas, uint64_t nonce,
                            TxKind kind = TxKind::kTransfer,
                            std::string function = {});

    bool operator==(const Transaction &) const = default;
  };

  using TxPtr = std::shared_ptr<const Transaction>;

  Digest transaction_id(const Transaction &tx);
  void encode(ByteWriter &w, const Transaction &tx);
  /// Inverse of encode; the id is recomputed. Throws std::out_of_range on
  /// truncation and LedgerError on invalid fields.
  Transaction decode_transaction(ByteReader &r);

  inline bool is_cross_shard(const Transaction &tx, const ShardMap &shards) {
    return shards.of(tx.sender) != shards.of(tx.receiver);
  }

  struct CreditPayload {
    AccountId receiver;
    Yocto amount;
    bool operator==(const CreditPayload &) const = default;
  };
  struct CallPayload {
    AccountId contract;
    std::string function;
    Yocto deposit;
    bool operator==(const CallPayload &) const = default;
  };
  using ReceiptPayload = std::variant<CreditPayload, CallPayload>;

  /// Summary of the first phase carried to the receiving shard.
  struct PhaseOneSummary {
    ShardId origin_shard;
    AccountId sender;
    Yocto debited;  // amount + gas
    bool operator==(const PhaseOneSummary &) const = default;
  };

  struct Receipt {
    Digest id;
    Digest origin_tx;
    ShardId target_shard;
    ReceiptPayload payload;
    PhaseOneSummary former_result;

    bool operator==(const Receipt &) const = default;
  };

  const AccountId &receipt_receiver(const Receipt &r);
  /// Value carried by the receipt (credit amount or attached deposit).
  Yocto receipt_value(const Receipt &r);
  Digest receipt_id(const Receipt &r);
  void encode(ByteWriter &w, const Receipt &r);
  Receipt decode_receipt(ByteReader &r);

  enum class OutcomeStatus : uint8_t { kApplied = 0, kReverted = 1 };

  struct BalanceChange {
    AccountId account;
    YoctoDelta delta;
    bool operator==(const BalanceChange &) const = default;
  };

  struct ExecutionOutcome {
    OutcomeStatus status = OutcomeStatus::kApplied;
    std::string revert_reason;
    std::vector<BalanceChange> state_delta;
    Yocto gas_burned;
    std::optional<Receipt> emitted_receipt;

    bool applied() const {
      return status == OutcomeStatus::kApplied;
    }
  };

  struct ExecutionConfig {
    AssertPolarity polarity = AssertPolarity::kProse;
  };

  /// True when the attack contract rejects a call that would bring its
  /// balance from `balance` to `balance + deposit`.
  bool attack_contract_rejects(Yocto balance, Yocto deposit, Yocto threshold,
                               AssertPolarity polarity);

  /// Single-shard transfer or call. Applied iff the sender covers amount + gas;
  /// otherwise Reverted("insufficient") with the gas still burned.
  ExecutionOutcome execute_intra_tx(LedgerState &state, const Transaction &tx,
                                    const ShardMap &shards,
                                    const ExecutionConfig &config = {});

  /// First half of a cross-shard transaction on the sender's shard. On
  /// success debits amount + gas and emits the receipt for the receiver's
  /// shard.
  ExecutionOutcome execute_cstx_phase1(LedgerState &state, const Transaction &tx,
                                       const ShardMap &shards);

  /// Second half on the receiver's shard. A reverted call does not credit.
  ExecutionOutcome execute_receipt(LedgerState &state, const Receipt &r,
                                   const ExecutionConfig &config = {});

  /// Why a call with `deposit` to `contract` would be refused on `state`
  /// ("no contract", "Over"); empty when accepted.
  std::string contract_call_rejection(const LedgerState &state,
                                      const AccountId &contract, Yocto deposit,
                                      const ExecutionConfig &config = {});

  /// Why execute_transaction would revert on `state`; empty when it would
  /// apply. Cross-shard calls are judged on the sender side only. Does not
  /// mutate; throws the same LedgerErrors as execute_transaction.
  std::string transaction_rejection(const LedgerState &state, const Transaction &tx,
                                    const ShardMap &shards,
                                    const ExecutionConfig &config = {});

  /// Dispatches to execute_intra_tx or execute_cstx_phase1.
  ExecutionOutcome execute_transaction(LedgerState &state, const Transaction &tx,
                                       const ShardMap &shards,
                                       const ExecutionConfig &config = {});

}  // namespace shardsim::ledger
