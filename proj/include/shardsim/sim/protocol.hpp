/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shardsim/core/ledger.hpp"
#include "shardsim/core/roles.hpp"
#include "shardsim/sim/scheduler.hpp"

namespace shardsim::sim {

  enum class TxResolution {
    kFinalized,          // included in a finalized block, applied
    kFinalizedReverted,  // included in a finalized block, gas burned only
    kRolledBack,         // cancelled by a rollback and not requeued
    kExcluded,           // refused by block builders, never included
    kDropped,            // malformed (unknown sender and the like)
  };

  std::string_view to_string(TxResolution r);

  struct RollbackEvent {
    Height from_tip = 0;
    Height to_tip = 0;
    Height challenged_height = 0;
    Height finalized = 0;
    Digest offending_tx;
  };

  class ProtocolObserver {
   public:
    virtual ~ProtocolObserver() = default;

    virtual void on_block_appended(VirtualTime now, Height tip, Height finalized) {}
    virtual void on_block_finalized(VirtualTime now, Height height,
                                    const Digest &hash, size_t tx_count) {}
    virtual void on_rollback(VirtualTime now, const RollbackEvent &event) {}
    virtual void on_tx_resolved(VirtualTime now, const Digest &tx,
                                TxResolution resolution, Height height) {}
    virtual void on_invariant_violation(VirtualTime now, const std::string &what) {}
  };

  enum class FaultKind {
    kIgnoreUser,       // coordinator leaves one user's transactions out
    kCstxOnlyBlocks,   // coordinator drops every receipt from its candidates
    kMalformedChunks,  // producer returns corrupted chunks
    kBadCombinations,  // global validator finalizes a non-atomic block
  };

  std::string_view to_string(FaultKind k);
  FaultKind parse_fault_kind(std::string_view text);

  struct FaultBehavior {
    FaultKind kind = FaultKind::kIgnoreUser;
    AccountId target;  // kIgnoreUser only
  };

  class FaultError : public std::runtime_error {
   public:
    enum class Code { kUnknownRole, kUnsupported };
    FaultError(Code code, const std::string &what)
        : std::runtime_error(what), code_(code) {}
    Code code() const {
      return code_;
    }

   private:
    Code code_;
  };

  /// Common surface of the two protocols as driven by the harness.
  class Protocol {
   public:
    virtual ~Protocol() = default;

    virtual std::string_view name() const = 0;

    /// Schedules the protocol's first events.
    virtual void start(Scheduler &scheduler) = 0;

    /// A user transaction arrives at `now`.
    virtual void submit(ledger::TxPtr tx) = 0;

    virtual Height tip_height() const = 0;
    virtual Height finalized_height() const = 0;

    /// Balance in the current (tip) view.
    virtual Yocto balance_of(const AccountId &account) const = 0;

    /// Balances + burned gas + value that left a sender but was never
    /// credited. Constant for a correct protocol.
    virtual Yocto accounted_supply() const = 0;

    virtual void inject_fault(const RoleId &role, const FaultBehavior &behavior) = 0;

    /// Role reward balances, keyed by role text.
    virtual std::map<std::string, uint64_t> rewards() const {
      return {};
    }

    void add_observer(ProtocolObserver *observer) {
      observers_.push_back(observer);
    }

   protected:
    template <typename Fn>
    void notify(Fn &&fn) {
      // Observers may submit transactions from a callback; index-based
      // iteration tolerates observers registering more observers.
      for (size_t i = 0; i < observers_.size(); ++i) fn(*observers_[i]);
    }

   private:
    std::vector<ProtocolObserver *> observers_;
  };

}  // namespace shardsim::sim
