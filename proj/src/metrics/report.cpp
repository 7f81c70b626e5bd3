/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/metrics/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace shardsim::metrics {

  using nlohmann::json;

  double seconds(VirtualTime t) {
    return static_cast<double>(t.count()) / 1e6;
  }

  namespace {
    std::string fixed(double v, int digits) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*f", digits, v);
      return buf;
    }

    json attack_json(const AttackSummary &a) {
      return {{"rounds_executed", a.rounds_executed},
              {"rollbacks_caused", a.rollbacks_caused},
              {"excluded", a.excluded},
              {"net_height_progress", a.net_height_progress},
              {"max_progress_between_rollbacks", a.max_progress_between_rollbacks},
              {"attacker_cost_yocto", a.attacker_cost.to_string()}};
    }

    // Typed field access that reports the path on failure.
    class Reader {
     public:
      Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("", "expected an object");
      }

      const json &at(const std::string &key) const {
        auto it = j_.find(key);
        if (it == j_.end()) fail(key, "missing");
        return *it;
      }

      template <typename T>
      T get(const std::string &key) const {
        const auto &v = at(key);
        try {
          return v.get<T>();
        } catch (const json::exception &e) {
          fail(key, e.what());
        }
      }

      VirtualTime micros(const std::string &key) const {
        return VirtualTime{get<int64_t>(key)};
      }

      Yocto yocto(const std::string &key) const {
        try {
          return Yocto::parse(get<std::string>(key));
        } catch (const std::invalid_argument &e) {
          fail(key, e.what());
        }
      }

      [[noreturn]] void fail(const std::string &key, const std::string &what) const {
        auto where = key.empty() ? path_ : path_.empty() ? key : path_ + "." + key;
        throw ReportError("report field '" + where + "': " + what);
      }

      std::string child(const std::string &key) const {
        return path_.empty() ? key : path_ + "." + key;
      }

     private:
      const json &j_;
      std::string path_;
    };
  }  // namespace

  json to_json(const MetricsReport &r) {
    json series = json::array();
    for (const auto &p : r.series) {
      series.push_back({{"at_us", p.at.count()},
                        {"tip", p.tip},
                        {"finalized", p.finalized},
                        {"event", p.event}});
    }
    json stalls = json::array();
    for (const auto &w : r.stall_windows) {
      stalls.push_back({{"start_us", w.start.count()}, {"end_us", w.end.count()}});
    }
    json j = {
        {"scenario", r.scenario},
        {"protocol", r.protocol},
        {"seed", r.seed},
        {"shards", r.shards},
        {"duration_us", r.duration.count()},
        {"t_block_us", r.t_block.count()},
        {"network_latency_us", r.network_latency.count()},
        {"proof_policy", r.proof_policy},
        {"formula_1", r.formula_1},
        {"formula_2", r.formula_2},
        {"submitted_txs", r.submitted_txs},
        {"finalized_txs", r.finalized_txs},
        {"reverted_txs", r.reverted_txs},
        {"excluded_txs", r.excluded_txs},
        {"dropped_txs", r.dropped_txs},
        {"rolled_back_txs", r.rolled_back_txs},
        {"tip_height", r.tip_height},
        {"finalized_height", r.finalized_height},
        {"blocks_finalized", r.blocks_finalized},
        {"rollback_count", r.rollback_count},
        {"validator_failures", r.validator_failures},
        {"tps", r.tps},
        {"steady_state_tps", r.steady_state_tps},
        {"mean_block_interval_s", r.mean_block_interval},
        {"mean_latency_s", r.mean_latency},
        {"max_latency_s", r.max_latency},
        {"stall_windows", stalls},
        {"finalized_height_series", series},
        {"per_role_rewards", r.rewards},
        {"invariant_violations", r.invariant_violations},
        {"initial_supply_yocto", r.initial_supply.to_string()},
        {"final_supply_yocto", r.final_supply.to_string()},
    };
    j["attack"] = r.attack ? attack_json(*r.attack) : json(nullptr);
    return j;
  }

  MetricsReport report_from_json(const json &j) {
    Reader in(j, "");
    MetricsReport r;
    r.scenario = in.get<std::string>("scenario");
    r.protocol = in.get<std::string>("protocol");
    r.seed = in.get<uint64_t>("seed");
    r.shards = in.get<uint32_t>("shards");
    r.duration = in.micros("duration_us");
    r.t_block = in.micros("t_block_us");
    r.network_latency = in.micros("network_latency_us");
    r.proof_policy = in.get<std::string>("proof_policy");
    r.formula_1 = in.get<bool>("formula_1");
    r.formula_2 = in.get<bool>("formula_2");
    r.submitted_txs = in.get<uint64_t>("submitted_txs");
    r.finalized_txs = in.get<uint64_t>("finalized_txs");
    r.reverted_txs = in.get<uint64_t>("reverted_txs");
    r.excluded_txs = in.get<uint64_t>("excluded_txs");
    r.dropped_txs = in.get<uint64_t>("dropped_txs");
    r.rolled_back_txs = in.get<uint64_t>("rolled_back_txs");
    r.tip_height = in.get<Height>("tip_height");
    r.finalized_height = in.get<Height>("finalized_height");
    r.blocks_finalized = in.get<uint64_t>("blocks_finalized");
    r.rollback_count = in.get<uint64_t>("rollback_count");
    r.validator_failures = in.get<uint64_t>("validator_failures");
    r.tps = in.get<double>("tps");
    r.steady_state_tps = in.get<double>("steady_state_tps");
    r.mean_block_interval = in.get<double>("mean_block_interval_s");
    r.mean_latency = in.get<double>("mean_latency_s");
    r.max_latency = in.get<double>("max_latency_s");
    const auto &stalls = in.at("stall_windows");
    if (!stalls.is_array()) in.fail("stall_windows", "expected an array");
    for (size_t i = 0; i < stalls.size(); ++i) {
      Reader w(stalls[i], "stall_windows." + std::to_string(i));
      r.stall_windows.push_back({w.micros("start_us"), w.micros("end_us")});
    }
    const auto &series = in.at("finalized_height_series");
    if (!series.is_array()) in.fail("finalized_height_series", "expected an array");
    for (size_t i = 0; i < series.size(); ++i) {
      Reader p(series[i], "finalized_height_series." + std::to_string(i));
      r.series.push_back({p.micros("at_us"), p.get<Height>("tip"), p.get<Height>("finalized"),
                          p.get<std::string>("event")});
    }
    r.rewards = in.get<std::map<std::string, uint64_t>>("per_role_rewards");
    r.invariant_violations = in.get<std::vector<std::string>>("invariant_violations");
    r.initial_supply = in.yocto("initial_supply_yocto");
    r.final_supply = in.yocto("final_supply_yocto");
    const auto &a = in.at("attack");
    if (!a.is_null()) {
      Reader ar(a, "attack");
      AttackSummary s;
      s.rounds_executed = ar.get<uint32_t>("rounds_executed");
      s.rollbacks_caused = ar.get<uint32_t>("rollbacks_caused");
      s.excluded = ar.get<uint32_t>("excluded");
      s.net_height_progress = ar.get<Height>("net_height_progress");
      s.max_progress_between_rollbacks = ar.get<Height>("max_progress_between_rollbacks");
      s.attacker_cost = ar.yocto("attacker_cost_yocto");
      r.attack = s;
    }
    return r;
  }

  std::string render_json(const MetricsReport &report) {
    return to_json(report).dump(2) + "\n";
  }

  MetricsReport parse_report(const std::string &text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error &e) {
      throw ReportError(std::string("report is not valid JSON: ") + e.what());
    }
    return report_from_json(j);
  }

  std::string render_csv(const MetricsReport &r) {
    std::ostringstream out;
    out << "time_s,tip,finalized,event\n";
    for (const auto &p : r.series) {
      out << fixed(seconds(p.at), 6) << ',' << p.tip << ',' << p.finalized << ',' << p.event
          << '\n';
    }
    return out.str();
  }

  std::string render_summary(const MetricsReport &r) {
    std::ostringstream out;
    out << r.protocol << " " << r.scenario << ": finalized " << r.finalized_height << "/"
        << r.tip_height << " blocks, " << r.finalized_txs << " txs, tps "
        << fixed(r.tps, 2) << " (steady " << fixed(r.steady_state_tps, 2) << "), rollbacks "
        << r.rollback_count << ", stalls " << r.stall_windows.size() << ", violations "
        << r.invariant_violations.size();
    return out.str();
  }

  namespace {
    constexpr double kWidth = 640, kHeight = 360, kMargin = 48;
    const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    struct Frame {
      double xmax, ymax;
      double x(double v) const {
        return kMargin + (xmax > 0 ? v / xmax : 0) * (kWidth - 2 * kMargin);
      }
      double y(double v) const {
        return kHeight - kMargin - (ymax > 0 ? v / ymax : 0) * (kHeight - 2 * kMargin);
      }
    };

    std::string svg_open(const std::string &title, const std::string &xlabel,
                         const std::string &ylabel, const Frame &f) {
      std::ostringstream o;
      o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
        << "</text>\n"
        << "<line x1=\"" << kMargin << "\" y1=\"" << f.y(0) << "\" x2=\"" << kWidth - kMargin
        << "\" y2=\"" << f.y(0) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kMargin << "\" y1=\"" << f.y(0) << "\" x2=\"" << kMargin
        << "\" y2=\"" << kMargin << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">" << xlabel << " (max " << fixed(f.xmax, 1)
        << ")</text>\n"
        << "<text x=\"12\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 12 "
        << kHeight / 2 << ")\" text-anchor=\"middle\">" << ylabel << " (max "
        << fixed(f.ymax, 1) << ")</text>\n";
      return o.str();
    }
  }  // namespace

  std::string render_height_svg(const std::vector<MetricsReport> &reports) {
    Frame f{0, 0};
    for (const auto &r : reports) {
      f.xmax = std::max(f.xmax, seconds(r.duration));
      for (const auto &p : r.series) f.ymax = std::max(f.ymax, static_cast<double>(p.tip));
    }
    std::ostringstream o;
    o << svg_open("height vs time", "virtual seconds", "height", f);
    for (size_t i = 0; i < reports.size(); ++i) {
      const auto &r = reports[i];
      const char *color = kColors[i % std::size(kColors)];
      std::ostringstream fin, tip;
      // Step lines starting from genesis.
      double px = 0, pf = 0, pt = 0;
      fin << f.x(0) << "," << f.y(0);
      tip << f.x(0) << "," << f.y(0);
      for (const auto &p : r.series) {
        double x = seconds(p.at);
        fin << " " << f.x(x) << "," << f.y(pf) << " " << f.x(x) << ","
            << f.y(static_cast<double>(p.finalized));
        tip << " " << f.x(x) << "," << f.y(pt) << " " << f.x(x) << ","
            << f.y(static_cast<double>(p.tip));
        px = x;
        pf = static_cast<double>(p.finalized);
        pt = static_cast<double>(p.tip);
      }
      double end = std::max(px, seconds(r.duration));
      fin << " " << f.x(end) << "," << f.y(pf);
      tip << " " << f.x(end) << "," << f.y(pt);
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
        << fin.str() << "\"/>\n";
      o << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-dasharray=\"4 3\" points=\"" << tip.str() << "\"/>\n";
      o << "<text x=\"" << kMargin + 8 << "\" y=\"" << kMargin + 16 * i << "\" fill=\""
        << color << "\">" << r.protocol << " " << r.scenario
        << " (solid finalized, dashed tip)</text>\n";
    }
    o << "</svg>\n";
    return o.str();
  }

  std::string render_tps_svg(const std::vector<MetricsReport> &reports) {
    Frame f{0, 0};
    for (const auto &r : reports) {
      f.xmax = std::max(f.xmax, static_cast<double>(r.shards));
      f.ymax = std::max(f.ymax, r.tps);
    }
    std::ostringstream o;
    o << svg_open("TPS vs shards", "shards", "TPS", f);
    for (size_t i = 0; i < reports.size(); ++i) {
      const auto &r = reports[i];
      const char *color = r.protocol == "synchro" ? kColors[0] : kColors[1];
      o << "<circle cx=\"" << f.x(r.shards) << "\" cy=\"" << f.y(r.tps)
        << "\" r=\"4\" fill=\"" << color << "\"><title>" << r.protocol << " " << r.scenario
        << ": " << fixed(r.tps, 2) << "</title></circle>\n";
    }
    o << "</svg>\n";
    return o.str();
  }

}  // namespace shardsim::metrics
