// Command-line front end: benchmarks, single runs, offline planning,
// replay, trajectory scoring and the session server.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include "hunt/hunt.hpp"
#include "hunt/session_server.hpp"

namespace fs = std::filesystem;
using namespace hunt;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

struct PressureFlags {
  std::optional<double> fog;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> targets;
  std::string net;

  void add(CLI::App* app) {
    app->add_option("--fog", fog, "Detection radius override (m)");
    app->add_option("--budget", budget, "Feature budget R");
    app->add_option("--horizon", horizon, "Step horizon T");
    app->add_option("--targets", targets, "Number of targets to sample");
    app->add_option("--net", net, "Bayes net JSON (default: built-in)");
  }

  ScenarioSpec spec(const std::string& layout) const {
    ScenarioSpec s;
    s.layout_ref = layout;
    s.net_ref = net;
    s.pressure.fog_radius = fog;
    if (budget) s.pressure.budget = *budget;
    if (horizon) s.pressure.horizon = *horizon;
    s.target_count = targets;
    return s;
  }
};

std::atomic<StreamServer*> g_stream{nullptr};
std::atomic<httplib::Server*> g_http{nullptr};

void on_signal(int) {
  if (auto* s = g_http.load()) s->stop();
  if (auto* s = g_stream.load()) s->stop();
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::cfg::load_env_levels();
  CLI::App app{"Treasure-hunt benchmark: simulated and human information gathering"};
  app.set_config("--config", "", "TOML key = value file; [section] names match subcommands");
  app.require_subcommand(1);

  // active-bench
  auto* bench = app.add_subcommand("active-bench", "Run a strategy x scenario x seed matrix");
  std::vector<std::string> b_scen{"human10x10"};
  std::vector<std::string> b_strat{"adaptive_switch", "forward_explore"};
  std::size_t b_seeds = 10;
  std::uint64_t b_master = 0;
  std::string b_out = "bench_out";
  std::size_t b_threads = 0;
  bool b_logs = false;
  PressureFlags b_press;
  bench->add_option("--scenario", b_scen, "Layout names or files")->delimiter(',');
  bench->add_option("--strategy", b_strat, "Strategy ids")->delimiter(',');
  bench->add_option("--seeds", b_seeds, "Seeds per cell")->check(CLI::PositiveNumber);
  bench->add_option("--master-seed", b_master, "Master seed");
  bench->add_option("--out", b_out, "Output directory");
  bench->add_option("--threads", b_threads, "Worker threads (0: all cores)");
  bench->add_flag("--keep-logs", b_logs, "Also write one trajectory log per cell");
  b_press.add(bench);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run one strategy on one scenario and write its log");
  std::string s_scen = "human10x10", s_strat = "adaptive_switch", s_out;
  std::uint64_t s_seed = 0;
  PressureFlags s_press;
  sim->add_option("--scenario", s_scen, "Layout name or file");
  sim->add_option("--strategy", s_strat, "Strategy id");
  sim->add_option("--seed", s_seed, "Run seed");
  sim->add_option("--out", s_out, "Log file (JSON lines)");
  s_press.add(sim);

  // plan
  auto* planc = app.add_subcommand("plan", "Offline plan with every target known; JSON and SVG");
  std::string p_scen = "human10x10", p_method = "prm", p_out = "plan";
  std::uint64_t p_seed = 0;
  std::size_t p_samples = 500, p_neighbors = 8;
  PressureFlags p_press;
  planc->add_option("--scenario", p_scen, "Layout name or file");
  planc->add_option("--seed", p_seed, "Scenario and roadmap seed");
  planc->add_option("--method", p_method, "prm | celldecomp")->check(CLI::IsMember({"prm", "celldecomp"}));
  planc->add_option("--samples", p_samples, "PRM samples");
  planc->add_option("--neighbors", p_neighbors, "PRM neighbours");
  planc->add_option("--out", p_out, "Output prefix (writes <prefix>.json and <prefix>.svg)");
  p_press.add(planc);

  // passive-bench
  auto* passive = app.add_subcommand("passive-bench", "Heuristic classification under time pressure");
  std::string pb_data = std::string(HUNT_DATA_DIR) + "/car_evaluation.csv", pb_out = "passive_out",
              pb_merge = "good-up";
  std::uint64_t pb_seed = 0;
  double pb_smoothing = 1.0, pb_lambda = 400.0;
  bool pb_timed = false;
  passive->add_option("--data", pb_data, "Car evaluation CSV");
  passive->add_option("--seed", pb_seed, "Train/test split seed");
  passive->add_option("--merge", pb_merge, "Label merge: good-up | acc-up");
  passive->add_option("--smoothing", pb_smoothing, "Laplace smoothing");
  passive->add_option("--lambda", pb_lambda, "Pressure time constant (ms)");
  passive->add_flag("--timed", pb_timed, "Measure processing time (report not reproducible)");
  passive->add_option("--out", pb_out, "Output directory");

  // replay
  auto* rep = app.add_subcommand("replay", "Re-run a log through the engine and compare");
  std::string r_log;
  rep->add_option("log", r_log, "Trajectory log")->required();

  // loglik
  auto* ll = app.add_subcommand("loglik", "Log-likelihood of a trajectory under a behaviour model");
  std::vector<std::string> l_logs;
  std::vector<std::string> l_models{"adaptive_switch", "forward_explore"};
  double l_slack = 0.05;
  std::size_t l_k = 150;
  ll->add_option("log", l_logs, "Trajectory logs")->required();
  ll->add_option("--model", l_models, "Model ids")->delimiter(',');
  ll->add_option("--slack", l_slack, "Probability mass for off-model actions");
  ll->add_option("--switch-steps", l_k, "Expected exploration stint length K");

  // metrics
  auto* met = app.add_subcommand("metrics", "Recompute metrics from a log");
  std::string m_log;
  met->add_option("log", m_log, "Trajectory log")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Session server: HTTP and length-prefixed TCP");
  int v_port = 8080, v_stream = 0;
  std::string v_host = "127.0.0.1", v_logs = "sessions";
  serve->add_option("--port", v_port, "HTTP port");
  serve->add_option("--stream-port", v_stream, "TCP stream port (0: HTTP port + 1)");
  serve->add_option("--host", v_host, "Bind address");
  serve->add_option("--log-dir", v_logs, "Directory for finished session logs");

  // layouts
  auto* lay = app.add_subcommand("layouts", "List built-in layouts, or write them and the default net as JSON");
  std::string y_out;
  lay->add_option("--out", y_out, "Directory to write layouts/<name>.json and nets/active_default.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      BenchConfig cfg;
      for (const auto& s : b_strat) cfg.strategies.push_back(parse_strategy(s));
      for (const auto& s : b_scen) cfg.scenarios.push_back(b_press.spec(s));
      cfg.seeds = b_seeds;
      cfg.master_seed = b_master;
      cfg.threads = b_threads;
      cfg.keep_logs = b_logs;
      spdlog::info("running {} cells", cfg.strategies.size() * cfg.scenarios.size() * cfg.seeds);
      const auto report = run_matrix(cfg);
      write_bench(report, cfg, b_out);
      std::size_t errors = 0;
      for (const auto& r : report.rows)
        if (!r.ok) {
          ++errors;
          spdlog::warn("{} / {} / seed {}: {}", r.scenario, r.strategy, r.seed_index, r.error);
        }
      std::cout << bench_summary(report).dump(2) << "\n";
      spdlog::info("wrote {}/results.csv and results.json ({} errors)", b_out, errors);
      return 0;
    }
    if (*sim) {
      const auto sc = sample_scenario(s_press.spec(s_scen), s_seed);
      auto strategy = make_strategy(parse_strategy(s_strat), {}, s_seed);
      const auto log = run(sc.workspace, sc.net, sc.config, *strategy, s_seed);
      if (!s_out.empty()) write_file(s_out, to_jsonl(log));
      auto m = to_json(compute_metrics(log));
      m["end_reason"] = log.end_reason;
      std::cout << m.dump(2) << "\n";
      return 0;
    }
    if (*planc) {
      const auto sc = sample_scenario(p_press.spec(p_scen), p_seed);
      PlannerParams pp;
      pp.method = p_method == "prm" ? RoadmapMethod::Prm : RoadmapMethod::CellDecomp;
      pp.prm = {p_samples, p_neighbors, derive_seed(p_seed, "roadmap")};
      const auto sol = plan_offline(sc.workspace, sc.net, sc.config, pp);
      auto j = to_json(sol);
      j["scenario"] = p_scen;
      j["method"] = p_method;
      write_file(p_out + ".json", j.dump(2) + "\n");
      write_file(p_out + ".svg", render_svg(sc.workspace, sol.path, sol.sequence));
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*passive) {
      const auto split = ingest_car_eval_file(pb_data, pb_seed, parse_car_merge(pb_merge));
      const auto net = learn_cpts(split.train, pb_smoothing);
      PassiveBenchConfig cfg;
      cfg.lambda_ms = pb_lambda;
      cfg.measure_time = pb_timed;
      const auto report = run_passive_bench(split.test, net, cfg);
      fs::create_directories(pb_out);
      write_file(fs::path(pb_out) / "passive.csv", passive_report_csv(report));
      write_file(fs::path(pb_out) / "passive.json", passive_report_json(report).dump(2) + "\n");
      std::cout << passive_report_csv(report);
      return 0;
    }
    if (*rep) {
      const auto log = parse_jsonl(read_file(r_log));
      const auto r = replay(log);
      nlohmann::json j = {{"rows", r.rows}, {"mismatches", r.mismatches}, {"identical", r.identical}};
      if (r.first_mismatch) j["first_mismatch"] = *r.first_mismatch;
      std::cout << j.dump(2) << "\n";
      return r.identical ? 0 : 1;
    }
    if (*ll) {
      LoglikParams lp;
      lp.slack = l_slack;
      lp.switch_steps = l_k;
      nlohmann::json out = nlohmann::json::array();
      for (const auto& path : l_logs) {
        const auto log = parse_jsonl(read_file(path));
        nlohmann::json j = {{"log", path}, {"rows", log.rows.size()}};
        for (const auto& m : l_models) j[m] = trajectory_log_likelihood(log, parse_loglik_model(m), lp);
        out.push_back(std::move(j));
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*met) {
      const auto log = parse_jsonl(read_file(m_log));
      std::cout << to_json(compute_metrics(log)).dump(2) << "\n";
      return 0;
    }
    if (*serve) {
      SessionManager mgr{fs::path(v_logs)};
      httplib::Server http;
      mount_http(http, mgr);
      StreamServer stream(mgr);
      const int sport = stream.listen(v_host, v_stream ? v_stream : v_port + 1);
      g_http = &http;
      g_stream = &stream;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::thread st([&] { stream.serve(); });
      spdlog::info("http on {}:{} (POST /v1/message), stream on {}:{}; logs in {}", v_host, v_port, v_host, sport, v_logs);
      const bool ok = http.listen(v_host, v_port);
      stream.stop();
      st.join();
      if (!ok) spdlog::error("could not bind http port {}", v_port);
      return ok ? 0 : 1;
    }
    if (*lay) {
      if (y_out.empty()) {
        for (const auto& n : layouts::names()) {
          const auto l = *layouts::find(n);
          std::cout << n << "  " << l.workspace.bounds.width() << "x" << l.workspace.bounds.height() << "  targets "
                    << l.target_count << "  fog " << (l.fog_radius ? std::to_string(*l.fog_radius) : "-") << "\n";
        }
        return 0;
      }
      for (const auto& n : layouts::names())
        write_file(fs::path(y_out) / "layouts" / (n + ".json"), to_json(*layouts::find(n)).dump(2) + "\n");
      write_file(fs::path(y_out) / "nets" / "active_default.json", to_json(default_active_net()).dump(2) + "\n");
      return 0;
    }
  } catch (const HuntError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
  return 0;
}
