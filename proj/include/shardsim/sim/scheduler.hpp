/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "shardsim/core/types.hpp"

namespace shardsim::sim {

  /// Discrete-event loop over virtual time. Events at the same instant fire in
  /// scheduling order, which keeps runs reproducible.
  class Scheduler {
   public:
    using Action = std::function<void()>;

    VirtualTime now() const {
      return now_;
    }

    /// `at` earlier than now() is clamped to now().
    void schedule_at(VirtualTime at, std::string actor, Action action);
    void schedule_after(VirtualTime delay, std::string actor, Action action);

    /// Fires every event with fire time <= `end`, then leaves now() at `end`.
    void run_until(VirtualTime end);

    size_t processed() const {
      return processed_;
    }
    size_t pending() const {
      return queue_.size();
    }

   private:
    struct Event {
      VirtualTime fire_at;
      uint64_t seq;
      std::string actor;
      Action action;
    };
    struct Later {
      bool operator()(const Event &a, const Event &b) const {
        if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
        return a.seq > b.seq;
      }
    };

    VirtualTime now_{0};
    uint64_t next_seq_ = 0;
    size_t processed_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
  };

}  // namespace shardsim::sim
