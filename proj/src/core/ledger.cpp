/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/core/ledger.hpp"

#include <algorithm>

namespace shardsim::ledger {

  ShardId shard_of(const AccountId &account, uint32_t shard_count) {
    if (shard_count == 0) {
      throw std::invalid_argument("shard count must be at least 1");
    }
    auto d = sha256(account.name);
    uint64_t r = 0;
    for (auto b : d.bytes) {
      r = (r * 256 + b) % shard_count;
    }
    return ShardId{static_cast<uint32_t>(r)};
  }

  ShardMap::ShardMap(uint32_t shard_count) : shard_count_(shard_count) {
    if (shard_count == 0) {
      throw std::invalid_argument("shard count must be at least 1");
    }
  }

  ShardId ShardMap::of(const AccountId &account) const {
    if (shard_count_ == 1) return ShardId{0};
    auto it = cache_.find(account.name);
    if (it != cache_.end()) return it->second;
    auto s = shard_of(account, shard_count_);
    cache_.emplace(account.name, s);
    return s;
  }

  LedgerState::LedgerState(ShardId shard, uint32_t shard_count)
      : shard_(shard), shard_count_(shard_count) {
    if (shard_count == 0 || shard.value >= shard_count) {
      throw std::invalid_argument("shard index out of range");
    }
  }

  const Account *LedgerState::find(const AccountId &id) const {
    auto it = accounts_.find(id);
    return it == accounts_.end() ? nullptr : &it->second;
  }

  Yocto LedgerState::balance(const AccountId &id) const {
    auto *a = find(id);
    return a ? a->balance : Yocto{};
  }

  Account &LedgerState::ensure(const AccountId &id) {
    auto it = accounts_.find(id);
    if (it != accounts_.end()) return it->second;
    if (id.name.empty()) {
      throw LedgerError(LedgerError::Code::kInvalidTransaction,
                        "empty account id");
    }
    if (shard_of(id, shard_count_) != shard_) {
      throw LedgerError(LedgerError::Code::kWrongShard,
                        "account " + id.name + " does not live on shard "
                            + std::to_string(shard_.value));
    }
    return accounts_[id];
  }

  void LedgerState::create_account(const AccountId &id, Yocto balance,
                                   std::optional<ContractKind> contract) {
    if (accounts_.contains(id)) {
      throw LedgerError(LedgerError::Code::kAccountTaken,
                        "account already exists: " + id.name);
    }
    if (contract) {
      if (auto *attack = std::get_if<AttackContract>(&*contract);
          attack && attack->threshold == Yocto{}) {
        throw std::invalid_argument("attack contract threshold must be > 0");
      }
    }
    auto &acc = ensure(id);
    acc.balance = balance;
    acc.contract = std::move(contract);
    root_.reset();
  }

  void LedgerState::credit(const AccountId &id, Yocto amount) {
    ensure(id).balance += amount;
    root_.reset();
  }

  void LedgerState::debit(const AccountId &id, Yocto amount) {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) {
      throw LedgerError(LedgerError::Code::kUnknownAccount,
                        "unknown account: " + id.name);
    }
    if (it->second.balance < amount) {
      throw LedgerError(LedgerError::Code::kInsufficientBalance,
                        "insufficient balance: " + id.name);
    }
    it->second.balance -= amount;
    root_.reset();
  }

  Yocto LedgerState::total_balance() const {
    Yocto total;
    for (const auto &[_, acc] : accounts_) total += acc.balance;
    return total;
  }

  const Digest &LedgerState::state_root() const {
    if (!root_) root_ = compute_state_root(*this);
    return *root_;
  }

  Digest compute_state_root(const LedgerState &state) {
    ByteWriter w;
    w.str("shardsim/state");
    w.u64(state.accounts().size());
    for (const auto &[id, acc] : state.accounts()) {
      w.str(id.name);
      w.yocto(acc.balance);
      if (!acc.contract) {
        w.u8(0);
      } else if (auto *attack = std::get_if<AttackContract>(&*acc.contract)) {
        w.u8(1);
        w.yocto(attack->threshold);
      } else {
        w.u8(2);
      }
    }
    return w.finish();
  }

  void encode(ByteWriter &w, const Transaction &tx) {
    w.str(tx.sender.name)
        .str(tx.receiver.name)
        .yocto(tx.amount)
        .u8(static_cast<uint8_t>(tx.kind))
        .str(tx.function)
        .yocto(tx.gas)
        .u64(tx.nonce);
  }

  Transaction decode_transaction(ByteReader &r) {
    AccountId sender{r.str()};
    AccountId receiver{r.str()};
    auto amount = r.yocto();
    auto kind = r.u8();
    if (kind > 1) {
      throw LedgerError(LedgerError::Code::kInvalidTransaction, "unknown kind");
    }
    auto function = r.str();
    auto gas = r.yocto();
    auto nonce = r.u64();
    if (kind == 0 && !function.empty()) {
      throw LedgerError(LedgerError::Code::kInvalidTransaction,
                        "transfer with a function name");
    }
    return Transaction::make(std::move(sender), std::move(receiver), amount, gas,
                             nonce, static_cast<TxKind>(kind), std::move(function));
  }

  Digest transaction_id(const Transaction &tx) {
    ByteWriter w;
    w.str("shardsim/tx");
    encode(w, tx);
    return w.finish();
  }

  Transaction Transaction::make(AccountId sender, AccountId receiver,
                                Yocto amount, Yocto gas, uint64_t nonce,
                                TxKind kind, std::string function) {
    if (sender.name.empty() || receiver.name.empty()) {
      throw LedgerError(LedgerError::Code::kInvalidTransaction,
                        "transaction accounts must be non-empty");
    }
    if (gas == Yocto{}) {
      throw LedgerError(LedgerError::Code::kInvalidTransaction,
                        "transaction gas must be positive");
    }
    Transaction tx;
    tx.sender = std::move(sender);
    tx.receiver = std::move(receiver);
    tx.amount = amount;
    tx.kind = kind;
    tx.function = kind == TxKind::kContractCall ? std::move(function) : "";
    tx.gas = gas;
    tx.nonce = nonce;
    tx.id = transaction_id(tx);
    return tx;
  }

  const AccountId &receipt_receiver(const Receipt &r) {
    if (auto *c = std::get_if<CreditPayload>(&r.payload)) return c->receiver;
    return std::get<CallPayload>(r.payload).contract;
  }

  Yocto receipt_value(const Receipt &r) {
    if (auto *c = std::get_if<CreditPayload>(&r.payload)) return c->amount;
    return std::get<CallPayload>(r.payload).deposit;
  }

  void encode(ByteWriter &w, const Receipt &r) {
    w.digest(r.origin_tx).u32(r.target_shard.value);
    if (auto *c = std::get_if<CreditPayload>(&r.payload)) {
      w.u8(0).str(c->receiver.name).yocto(c->amount);
    } else {
      const auto &call = std::get<CallPayload>(r.payload);
      w.u8(1).str(call.contract.name).str(call.function).yocto(call.deposit);
    }
    w.u32(r.former_result.origin_shard.value)
        .str(r.former_result.sender.name)
        .yocto(r.former_result.debited);
  }

  Receipt decode_receipt(ByteReader &in) {
    Receipt r;
    r.origin_tx = in.digest();
    r.target_shard = ShardId{in.u32()};
    auto tag = in.u8();
    if (tag == 0) {
      AccountId receiver{in.str()};
      r.payload = CreditPayload{std::move(receiver), in.yocto()};
    } else if (tag == 1) {
      AccountId contract{in.str()};
      auto function = in.str();
      r.payload = CallPayload{std::move(contract), std::move(function), in.yocto()};
    } else {
      throw LedgerError(LedgerError::Code::kInvalidTransaction,
                        "unknown receipt payload");
    }
    r.former_result.origin_shard = ShardId{in.u32()};
    r.former_result.sender = AccountId{in.str()};
    r.former_result.debited = in.yocto();
    r.id = receipt_id(r);
    return r;
  }

  Digest receipt_id(const Receipt &r) {
    ByteWriter w;
    w.str("shardsim/receipt");
    encode(w, r);
    return w.finish();
  }

  bool attack_contract_rejects(Yocto balance, Yocto deposit, Yocto threshold,
                               AssertPolarity polarity) {
    auto after = balance + deposit;
    return polarity == AssertPolarity::kProse ? after > threshold
                                              : after <= threshold;
  }

  std::string contract_call_rejection(const LedgerState &state,
                                      const AccountId &contract, Yocto deposit,
                                      const ExecutionConfig &config) {
    auto *acc = state.find(contract);
    if (acc == nullptr || !acc->contract) return "no contract";
    if (auto *attack = std::get_if<AttackContract>(&*acc->contract)) {
      if (attack_contract_rejects(acc->balance, deposit, attack->threshold,
                                  config.polarity)) {
        return "Over";
      }
    }
    return {};
  }

  namespace {
    YoctoDelta neg(Yocto y) {
      return -static_cast<YoctoDelta>(y.value);
    }
    YoctoDelta pos(Yocto y) {
      return static_cast<YoctoDelta>(y.value);
    }

    ExecutionOutcome revert_with_gas(LedgerState &state, const AccountId &payer,
                                     Yocto gas, std::string reason) {
      ExecutionOutcome out;
      out.status = OutcomeStatus::kReverted;
      out.revert_reason = std::move(reason);
      auto burn = std::min(gas, state.balance(payer));
      if (burn != Yocto{}) {
        state.debit(payer, burn);
        out.state_delta.push_back({payer, neg(burn)});
      }
      out.gas_burned = burn;
      return out;
    }

    void require_sender(const LedgerState &state, const Transaction &tx) {
      if (state.find(tx.sender) == nullptr) {
        throw LedgerError(LedgerError::Code::kUnknownAccount,
                          "unknown sender: " + tx.sender.name);
      }
    }
  }  // namespace

  ExecutionOutcome execute_intra_tx(LedgerState &state, const Transaction &tx,
                                    const ShardMap &shards,
                                    const ExecutionConfig &config) {
    if (shards.of(tx.sender) != state.shard()) {
      throw LedgerError(LedgerError::Code::kWrongShard,
                        "sender not on executing shard");
    }
    if (shards.of(tx.receiver) != state.shard()) {
      throw LedgerError(LedgerError::Code::kCrossShard,
                        "cross-shard transaction given to intra-shard path");
    }
    require_sender(state, tx);
    auto need = tx.amount + tx.gas;
    if (state.balance(tx.sender) < need) {
      return revert_with_gas(state, tx.sender, tx.gas, "insufficient");
    }
    if (tx.kind == TxKind::kContractCall) {
      auto reason = contract_call_rejection(state, tx.receiver, tx.amount, config);
      if (!reason.empty()) {
        return revert_with_gas(state, tx.sender, tx.gas, std::move(reason));
      }
    }
    ExecutionOutcome out;
    state.debit(tx.sender, need);
    state.credit(tx.receiver, tx.amount);
    out.state_delta.push_back({tx.sender, neg(need)});
    out.state_delta.push_back({tx.receiver, pos(tx.amount)});
    out.gas_burned = tx.gas;
    return out;
  }

  ExecutionOutcome execute_cstx_phase1(LedgerState &state, const Transaction &tx,
                                       const ShardMap &shards) {
    if (shards.of(tx.sender) != state.shard()) {
      throw LedgerError(LedgerError::Code::kWrongShard,
                        "sender not on executing shard");
    }
    auto target = shards.of(tx.receiver);
    if (target == state.shard()) {
      throw LedgerError(LedgerError::Code::kNotCrossShard,
                        "intra-shard transaction given to cross-shard path");
    }
    require_sender(state, tx);
    auto need = tx.amount + tx.gas;
    if (state.balance(tx.sender) < need) {
      return revert_with_gas(state, tx.sender, tx.gas, "insufficient");
    }
    state.debit(tx.sender, need);

    Receipt r;
    r.origin_tx = tx.id;
    r.target_shard = target;
    if (tx.kind == TxKind::kContractCall) {
      r.payload = CallPayload{tx.receiver, tx.function, tx.amount};
    } else {
      r.payload = CreditPayload{tx.receiver, tx.amount};
    }
    r.former_result = PhaseOneSummary{state.shard(), tx.sender, need};
    r.id = receipt_id(r);

    ExecutionOutcome out;
    out.state_delta.push_back({tx.sender, neg(need)});
    out.gas_burned = tx.gas;
    out.emitted_receipt = std::move(r);
    return out;
  }

  ExecutionOutcome execute_receipt(LedgerState &state, const Receipt &r,
                                   const ExecutionConfig &config) {
    if (r.target_shard != state.shard()) {
      throw LedgerError(LedgerError::Code::kUnknownReceiptTarget,
                        "receipt targets shard "
                            + std::to_string(r.target_shard.value)
                            + ", executing on "
                            + std::to_string(state.shard().value));
    }
    ExecutionOutcome out;
    if (auto *call = std::get_if<CallPayload>(&r.payload)) {
      auto reason = contract_call_rejection(state, call->contract, call->deposit, config);
      if (!reason.empty()) {
        out.status = OutcomeStatus::kReverted;
        out.revert_reason = std::move(reason);
        return out;
      }
    }
    const auto &receiver = receipt_receiver(r);
    auto value = receipt_value(r);
    state.credit(receiver, value);
    out.state_delta.push_back({receiver, pos(value)});
    return out;
  }

  std::string transaction_rejection(const LedgerState &state, const Transaction &tx,
                                    const ShardMap &shards,
                                    const ExecutionConfig &config) {
    if (shards.of(tx.sender) != state.shard()) {
      throw LedgerError(LedgerError::Code::kWrongShard,
                        "sender not on executing shard");
    }
    require_sender(state, tx);
    if (state.balance(tx.sender) < tx.amount + tx.gas) return "insufficient";
    bool cross = shards.of(tx.receiver) != state.shard();
    if (!cross && tx.kind == TxKind::kContractCall) {
      return contract_call_rejection(state, tx.receiver, tx.amount, config);
    }
    return {};
  }

  ExecutionOutcome execute_transaction(LedgerState &state, const Transaction &tx,
                                       const ShardMap &shards,
                                       const ExecutionConfig &config) {
    if (is_cross_shard(tx, shards)) {
      return execute_cstx_phase1(state, tx, shards);
    }
    return execute_intra_tx(state, tx, shards, config);
  }

}  // namespace shardsim::ledger
