/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/metrics/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shardsim/sim/scenario.hpp"

namespace shardsim::metrics {

  namespace fs = std::filesystem;

  namespace {
    std::vector<std::string> overrides_of(const CliOptions &o) {
      auto all = o.overrides;
      if (o.seed) all.push_back("params.seed=" + std::to_string(*o.seed));
      if (o.protocol) all.push_back("protocol=\"" + *o.protocol + "\"");
      return all;
    }

    void write_file(const fs::path &path, const std::string &text) {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + path.string());
      f << text;
    }

    void write_run(const fs::path &dir, const MetricsReport &r) {
      fs::create_directories(dir);
      write_file(dir / "report.json", render_json(r));
      write_file(dir / "series.csv", render_csv(r));
      write_file(dir / "height.svg", render_height_svg({r}));
    }

    std::string num(double v, int digits) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*f", digits, v);
      return buf;
    }

    template <typename Fn>
    int guarded(std::ostream &err, Fn &&fn) {
      try {
        return fn();
      } catch (const sim::ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
      } catch (const ReportError &e) {
        err << "report error: " << e.what() << "\n";
        return kExitConfig;
      } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
      }
    }
  }  // namespace

  int cli_run(const CliOptions &opts, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
      auto sc = sim::load_scenario(opts.scenario, overrides_of(opts));
      auto report = sim::run_scenario(sc);
      write_run(opts.out, report);
      out << render_summary(report) << "\n";
      for (const auto &v : report.invariant_violations) err << "violation: " << v << "\n";
      return report.invariant_violations.empty() ? kExitOk : kExitViolation;
    });
  }

  int cli_compare(const CliOptions &opts, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
      auto sc = sim::load_scenario(opts.scenario, overrides_of(opts));
      auto base = sim::run_scenario(sc, "baseline");
      auto syn = sim::run_scenario(sc, "synchro");
      fs::path dir(opts.out);
      write_run(dir / "baseline", base);
      write_run(dir / "synchro", syn);
      write_file(dir / "height.svg", render_height_svg({base, syn}));

      const auto &p = sc.params;
      auto model = sim::model_synchro_throughput(p, p.max_txs_per_chunk);
      double ratio = base.steady_state_tps > 0 ? syn.steady_state_tps / base.steady_state_tps : 0;
      nlohmann::json cmp = {
          {"scenario", sc.name},
          {"seed", p.seed},
          {"shards", p.shards},
          {"formula_1", sim::check_formula_1(p)},
          {"formula_2", sim::check_formula_2(p)},
          {"formula_2_bound_us", sim::formula_2_bound(p.shards, p.t_zk_v).count()},
          {"modeled_synchro_interval_us", model.interval.count()},
          {"modeled_synchro_tps", model.tps},
          {"modeled_bottleneck", model.bottleneck},
          {"baseline_steady_state_tps", base.steady_state_tps},
          {"synchro_steady_state_tps", syn.steady_state_tps},
          {"steady_state_ratio", ratio},
          {"baseline_mean_block_interval_s", base.mean_block_interval},
          {"synchro_mean_block_interval_s", syn.mean_block_interval},
      };
      write_file(dir / "compare.json", cmp.dump(2) + "\n");

      std::ostringstream t;
      t << "scenario " << sc.name << ", seed " << p.seed << ", s=" << p.shards
        << ", latency " << num(seconds(p.network_latency), 3) << " s\n"
        << "formula 1 (t_chunk + t_zk_p <= t_block): "
        << (sim::check_formula_1(p) ? "satisfied" : "violated") << "\n"
        << "formula 2 (s * t_zk_v = " << num(seconds(sim::formula_2_bound(p.shards, p.t_zk_v)), 6)
        << " s <= t_chunk + t_zk_p): " << (sim::check_formula_2(p) ? "satisfied" : "violated")
        << "\n"
        << "modeled synchro interval " << num(seconds(model.interval), 6) << " s, "
        << num(model.tps, 1) << " tps at full chunks (" << model.bottleneck << " bound)\n\n";
      char line[256];
      std::snprintf(line, sizeof line, "%-9s %12s %12s %12s %14s %12s %10s\n", "protocol",
                    "final txs", "tps", "steady tps", "interval (s)", "latency (s)",
                    "rollbacks");
      t << line;
      for (const auto *r : {&base, &syn}) {
        std::snprintf(line, sizeof line, "%-9s %12llu %12.2f %12.2f %14.4f %12.4f %10llu\n",
                      r->protocol.c_str(), static_cast<unsigned long long>(r->finalized_txs),
                      r->tps, r->steady_state_tps, r->mean_block_interval, r->mean_latency,
                      static_cast<unsigned long long>(r->rollback_count));
        t << line;
      }
      t << "\nsteady-state ratio synchro/baseline: " << num(ratio, 4) << "\n";
      write_file(dir / "compare.txt", t.str());
      out << t.str();
      bool clean = base.invariant_violations.empty() && syn.invariant_violations.empty();
      for (const auto *r : {&base, &syn}) {
        for (const auto &v : r->invariant_violations) {
          err << r->protocol << " violation: " << v << "\n";
        }
      }
      return clean ? kExitOk : kExitViolation;
    });
  }

  int cli_report(const std::vector<std::string> &files, const std::string &out_dir,
                 std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
      std::vector<MetricsReport> reports;
      for (const auto &f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw ReportError("cannot open " + f);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
          reports.push_back(parse_report(ss.str()));
        } catch (const ReportError &e) {
          throw ReportError(f + ": " + e.what());
        }
      }
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "height.svg", render_height_svg(reports));
      write_file(fs::path(out_dir) / "tps_vs_shards.svg", render_tps_svg(reports));
      for (const auto &r : reports) {
        out << render_summary(r) << "\n";
        for (const auto &w : r.stall_windows) {
          out << "  stall " << num(seconds(w.start), 3) << " s .. " << num(seconds(w.end), 3)
              << " s\n";
        }
      }
      return kExitOk;
    });
  }

}  // namespace shardsim::metrics
