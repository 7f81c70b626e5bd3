/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "shardsim/metrics/cli.hpp"
#include "shardsim/metrics/collector.hpp"
#include "shardsim/sim/scenario.hpp"

using namespace shardsim;
using namespace shardsim::metrics;
namespace fs = std::filesystem;

namespace {
  MetricsReport sample() {
    MetricsReport r;
    r.scenario = "s";
    r.protocol = "baseline";
    r.seed = 42;
    r.shards = 2;
    r.duration = VirtualTime{10'000'000};
    r.t_block = VirtualTime{1'000'000};
    r.proof_policy = "per_chunk";
    r.formula_1 = true;
    r.finalized_txs = 7;
    r.tps = 0.7;
    r.steady_state_tps = 1.0 / 3.0;
    r.series = {{VirtualTime{3'000'000}, 3, 1, "finalized"},
                {VirtualTime{4'000'000}, 1, 1, "rollback"}};
    r.stall_windows = {{VirtualTime{0}, VirtualTime{3'000'000}}};
    r.rewards = {{"gv/0", 3}};
    r.invariant_violations = {"x"};
    r.attack = AttackSummary{2, 2, 0, 0, 0, milli_near(2)};
    r.initial_supply = Yocto{(static_cast<unsigned __int128>(1) << 100) + 7};
    r.final_supply = r.initial_supply;
    return r;
  }

  fs::path fresh_dir(const std::string &name) {
    auto d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    return d;
  }

  std::string write(const fs::path &p, const std::string &text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
    return p.string();
  }
}  // namespace

TEST(MetricsReport, JsonRoundTrip) {
  auto r = sample();
  EXPECT_EQ(parse_report(render_json(r)), r);
  MetricsReport empty;
  EXPECT_EQ(parse_report(render_json(empty)), empty);
}

TEST(MetricsReport, MalformedReportNamesField) {
  auto j = to_json(sample());
  j["series_missing"] = 1;
  j.erase("tps");
  try {
    report_from_json(j);
    FAIL();
  } catch (const ReportError &e) {
    EXPECT_NE(std::string(e.what()).find("tps"), std::string::npos);
  }
  j = to_json(sample());
  j["finalized_height_series"][1]["tip"] = "high";
  EXPECT_THROW(report_from_json(j), ReportError);
  EXPECT_THROW(parse_report("{not json"), ReportError);
}

TEST(MetricsReport, CsvAndPlots) {
  auto r = sample();
  EXPECT_EQ(render_csv(r),
            "time_s,tip,finalized,event\n3.000000,3,1,finalized\n4.000000,1,1,rollback\n");
  auto svg = render_height_svg({r});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_NE(render_tps_svg({r}).find("circle"), std::string::npos);
  EXPECT_EQ(render_height_svg({}).find("polyline"), std::string::npos);
}

TEST(MetricsCollector, StallWindowsAndRates) {
  MetricsCollector c(VirtualTime{1'000'000});
  c.on_submit(VirtualTime{0}, Digest{});
  c.on_block_finalized(VirtualTime{1'000'000}, 1, {}, 4);
  c.on_tx_resolved(VirtualTime{1'000'000}, Digest{}, sim::TxResolution::kFinalized, 1);
  c.on_block_finalized(VirtualTime{2'000'000}, 2, {}, 6);
  c.on_block_finalized(VirtualTime{6'000'000}, 3, {}, 6);
  MetricsReport r;
  c.finish(r, VirtualTime{10'000'000});
  ASSERT_EQ(r.stall_windows.size(), 2u);
  EXPECT_EQ(r.stall_windows[0], (StallWindow{VirtualTime{2'000'000}, VirtualTime{6'000'000}}));
  EXPECT_EQ(r.stall_windows[1], (StallWindow{VirtualTime{6'000'000}, VirtualTime{10'000'000}}));
  EXPECT_EQ(r.blocks_finalized, 3u);
  EXPECT_EQ(r.finalized_txs, 1u);
  EXPECT_DOUBLE_EQ(r.tps, 0.1);
  EXPECT_DOUBLE_EQ(r.steady_state_tps, 12.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.mean_block_interval, 2.5);
  EXPECT_DOUBLE_EQ(r.mean_latency, 1.0);
}

TEST(Cli, RunWritesOutputsAndExitCodes) {
  auto dir = fresh_dir("shardsim_cli_run");
  auto scenario = write(dir / "sc.json", R"({"params": {"shards": 2, "duration": 10},
      "workload": {"tx_rate": 10, "accounts": 4},
      "attack": {"rounds": 3}, "protocol": "baseline"})");
  std::ostringstream out, err;
  CliOptions o;
  o.scenario = scenario;
  o.out = (dir / "out").string();
  EXPECT_EQ(cli_run(o, out, err), kExitOk) << err.str();
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "series.csv"));
  EXPECT_NE(out.str().find("rollbacks 3"), std::string::npos) << out.str();

  o.protocol = "synchro";
  std::ostringstream out2;
  EXPECT_EQ(cli_run(o, out2, err), kExitOk);
  EXPECT_NE(out2.str().find("rollbacks 0"), std::string::npos) << out2.str();

  o.scenario = (dir / "missing.json").string();
  EXPECT_EQ(cli_run(o, out, err), kExitConfig);
  o.scenario = scenario;
  o.overrides = {"params.bogus=1"};
  EXPECT_EQ(cli_run(o, out, err), kExitConfig);
}

TEST(Cli, InvariantViolationExitsOne) {
  // A single Byzantine validator out of one outweighs the honest chain.
  auto dir = fresh_dir("shardsim_cli_violation");
  auto scenario = write(dir / "sc.json", R"({"params": {"shards": 2, "duration": 5},
      "workload": {"tx_rate": 10, "accounts": 4},
      "faults": [{"role": "gv/0", "kind": "bad_combinations"}]})");
  std::ostringstream out, err;
  CliOptions o;
  o.scenario = scenario;
  o.out = (dir / "out").string();
  EXPECT_EQ(cli_run(o, out, err), kExitViolation);
  EXPECT_NE(err.str().find("violation"), std::string::npos);
}

TEST(Cli, CompareAndReport) {
  auto dir = fresh_dir("shardsim_cli_compare");
  auto scenario = write(dir / "sc.json", R"({"params": {"shards": 4, "duration": 30},
      "workload": {"tx_rate": 50, "accounts": 8}})");
  std::ostringstream out, err;
  CliOptions o;
  o.scenario = scenario;
  o.out = (dir / "cmp").string();
  ASSERT_EQ(cli_compare(o, out, err), kExitOk) << err.str();
  EXPECT_NE(out.str().find("formula 1"), std::string::npos);
  std::ifstream cj(dir / "cmp" / "compare.json");
  auto cmp = nlohmann::json::parse(cj);
  EXPECT_TRUE(cmp["formula_1"].get<bool>());
  EXPECT_NEAR(cmp["steady_state_ratio"].get<double>(), 1.0, 0.01);

  std::ostringstream rout;
  auto base = (dir / "cmp" / "baseline" / "report.json").string();
  auto syn = (dir / "cmp" / "synchro" / "report.json").string();
  EXPECT_EQ(cli_report({base, syn}, (dir / "plots").string(), rout, err), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "plots" / "tps_vs_shards.svg"));
  EXPECT_NE(rout.str().find("synchro"), std::string::npos);

  EXPECT_EQ(cli_report({}, (dir / "none").string(), rout, err), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "none" / "height.svg"));
  auto bad = write(dir / "bad.json", "{\"tps\": 1}");
  EXPECT_EQ(cli_report({bad}, (dir / "plots").string(), rout, err), kExitConfig);
}
