/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/sim/scheduler.hpp"

#include <algorithm>

namespace shardsim::sim {

  void Scheduler::schedule_at(VirtualTime at, std::string actor, Action action) {
    queue_.push(Event{std::max(at, now_), next_seq_++, std::move(actor),
                      std::move(action)});
  }

  void Scheduler::schedule_after(VirtualTime delay, std::string actor,
                                 Action action) {
    schedule_at(now_ + delay, std::move(actor), std::move(action));
  }

  void Scheduler::run_until(VirtualTime end) {
    while (!queue_.empty() && queue_.top().fire_at <= end) {
      // priority_queue::top is const; the action is moved out via a copy of
      // the node, which is cheap next to the event itself.
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.fire_at;
      ++processed_;
      ev.action();
    }
    now_ = std::max(now_, end);
  }

}  // namespace shardsim::sim
