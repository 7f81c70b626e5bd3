/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shardsim/attack/attack.hpp"
#include "shardsim/metrics/report.hpp"
#include "shardsim/nightshade/engine.hpp"
#include "shardsim/sim/workload.hpp"
#include "shardsim/synchro/engine.hpp"

namespace shardsim::sim {

  struct FaultSpec {
    RoleId role;
    FaultBehavior behavior;
  };

  struct Scenario {
    std::string name = "scenario";
    std::string protocol = "synchro";  // "synchro" or "baseline"
    SimulationParams params;
    WorkloadSpec workload;
    nightshade::BaselineConfig baseline;
    synchro::SynchroConfig synchro;
    ledger::ExecutionConfig execution;
    std::vector<FaultSpec> faults;
    std::optional<attack::AttackPlan> attack;

    /// Throws ConfigError naming the field.
    void validate() const;
  };

  /// Strict: unknown keys and wrong types raise ConfigError with the dotted
  /// path of the field. Times are seconds, amounts are strings (plain yocto or
  /// "<decimal> NEAR"). Missing keys keep their defaults.
  Scenario parse_scenario(const nlohmann::json &j);

  /// Sets a dotted path ("params.shards=100", "faults.0.kind=...") in `j`,
  /// creating objects on the way. The value is read as JSON when it parses,
  /// otherwise as a string.
  void apply_override(nlohmann::json &j, std::string_view assignment);

  /// Reads the scenario file, applies SHARDSIM_SEED when set, then
  /// `overrides` in order. Throws ConfigError for unreadable files too.
  nlohmann::json load_scenario_json(const std::string &path,
                                    const std::vector<std::string> &overrides = {});
  Scenario load_scenario(const std::string &path,
                         const std::vector<std::string> &overrides = {});

  /// Runs `scenario` under its own protocol setting.
  metrics::MetricsReport run_scenario(const Scenario &scenario);
  /// `setup` sees the engine after fault injection, before it starts.
  using ProtocolSetup = std::function<void(Protocol &)>;
  metrics::MetricsReport run_scenario(const Scenario &scenario, std::string_view protocol,
                                      const ProtocolSetup &setup = {});

}  // namespace shardsim::sim
