#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fogsim/calibrate.hpp"
#include "fogsim/echo.hpp"
#include "fogsim/engine.hpp"
#include "fogsim/experiments.hpp"
#include "fogsim/probe.hpp"
#include "fogsim/report.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/types.hpp"

namespace {

// Exit codes: 0 success, 1 usage, 2 config error, 3 runtime error,
// 4 calibration failure.
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitCalibration = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file_or_config_error(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fogsim::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_file_or_runtime_error(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

fogsim::Scenario parse_scenario_file(const std::string& path) {
  fogsim::ParseResult parsed = fogsim::parse_config(read_file_or_config_error(path));
  if (!parsed.scenario.has_value()) {
    std::string all;
    for (const fogsim::ParseIssue& issue : parsed.issues) {
      if (issue.kind == fogsim::ParseIssue::Kind::Syntax) {
        all += "  line " + std::to_string(issue.line) + ": " + issue.message + "\n";
      } else {
        all += "  " + issue.field + ": " + issue.message + "\n";
      }
    }
    throw fogsim::ConfigError("config '" + path + "' has " +
                              std::to_string(parsed.issues.size()) +
                              " problem(s):\n" + all);
  }
  return *parsed.scenario;
}

std::vector<std::string> split_list(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const std::string& arg : args) {
    std::string cur;
    for (char ch : arg) {
      if (ch == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + what + " '" + text + "' as a number");
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& trace_path) {
  fogsim::Scenario sc = parse_scenario_file(config_path);
  fogsim::ExperimentTable table = fogsim::simulate_table(sc);
  write_file(out_path, fogsim::to_csv(table));
  if (!trace_path.empty()) {
    write_file(trace_path, fogsim::run(sc).trace.serialize());
  }
  const fogsim::ResultRow& row = table.rows.front();
  std::printf("wrote %s: %zu completed, mean %.6f ms\n", out_path.c_str(),
              row.samples, row.stats.mean_ms);
  return 0;
}

int cmd_calibrate(const std::string& config_path,
                  const std::vector<std::string>& target_args,
                  const std::vector<std::string>& knob_args) {
  fogsim::Scenario base = parse_scenario_file(config_path);

  std::vector<fogsim::CalibrationTarget> targets;
  for (const std::string& spec : split_list(target_args)) {
    std::size_t eq = spec.rfind('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("target '" + spec + "' is not LABEL=MS");
    }
    fogsim::CalibrationTarget t;
    t.label = spec.substr(0, eq);
    t.scenario = base;
    t.target_ms = parse_number(spec.substr(eq + 1), "target for " + t.label);
    targets.push_back(std::move(t));
  }

  std::vector<fogsim::Knob> knobs;
  for (const std::string& spec : split_list(knob_args)) {
    std::size_t eq = spec.rfind('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("knob '" + spec + "' is not NAME=LO:HI");
    }
    std::string name = spec.substr(0, eq);
    std::string range = spec.substr(eq + 1);
    std::size_t colon = range.find(':');
    if (colon == std::string::npos) {
      throw UsageError("knob '" + spec + "' is not NAME=LO:HI");
    }
    fogsim::Knob k;
    k.path = name;
    k.lo = parse_number(range.substr(0, colon), "lower bound of " + name);
    k.hi = parse_number(range.substr(colon + 1), "upper bound of " + name);
    // Server counts are whole numbers; everything else bisects continuously.
    k.integer = name.size() > 17 &&
                name.compare(name.size() - 17, 17, ".parallel_servers") == 0;
    knobs.push_back(std::move(k));
  }

  if (targets.empty()) throw UsageError("at least one --target is required");
  if (knobs.empty()) throw UsageError("at least one --knob is required");

  fogsim::CalibrationResult res = fogsim::calibrate(targets, knobs);
  std::printf("%-12s %-36s %14s %14s %6s\n", "target", "knob", "value",
              "achieved_ms", "runs");
  for (const fogsim::FittedKnob& f : res.fitted) {
    std::printf("%-12s %-36s %14.6f %14.6f %6d\n", f.label.c_str(),
                f.path.c_str(), f.value, f.achieved_ms, f.evaluations);
  }
  return 0;
}

int cmd_experiment(const std::string& kind, const std::string& out_path) {
  fogsim::ExperimentTable table;
  if (kind == "ab") {
    table = fogsim::run_experiment_ab();
  } else if (kind == "c") {
    table = fogsim::run_experiment_c();
  } else {
    table = fogsim::run_experiment_rescue();
  }
  write_file(out_path, fogsim::to_csv(table));
  std::printf("wrote %s: %zu rows\n", out_path.c_str(), table.rows.size());
  return 0;
}

int cmd_probe(const fogsim::ProbeConfig& config) {
  fogsim::ProbeResult r = fogsim::probe(config);
  std::printf("%d packets sent, %zu lost\n", config.count, r.lost);
  if (r.stats.has_values()) {
    std::printf("rtt ms: min %.3f  mean %.3f  median %.3f  p95 %.3f  max %.3f\n",
                r.stats.min_ms, r.stats.mean_ms, r.stats.median_ms,
                r.stats.p95_ms, r.stats.max_ms);
  } else {
    std::printf("no replies\n");
  }
  return 0;
}

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

int cmd_echo(std::uint16_t port, double delay_ms, bool stream) {
  fogsim::EchoConfig config;
  config.port = port;
  config.transport = stream ? fogsim::Transport::Stream : fogsim::Transport::Datagram;
  config.delay_ms = delay_ms;
  fogsim::EchoServer server(config);
  std::printf("listening on %s port %u\n", stream ? "tcp" : "udp", server.port());
  std::fflush(stdout);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  server.stop();
  return 0;
}

int cmd_report(const std::string& in_path) {
  std::string rendered = fogsim::render_report(read_file_or_runtime_error(in_path));
  std::fputs(rendered.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic fog-robotics offloading simulator and RTT probe"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string trace_path;
  std::string in_path;
  std::string kind;
  std::vector<std::string> target_args;
  std::vector<std::string> knob_args;
  fogsim::ProbeConfig probe_config;
  bool probe_stream = false;
  std::uint16_t echo_port = 0;
  double echo_delay_ms = 0.0;
  bool echo_stream = false;

  CLI::App* sim = app.add_subcommand("simulate", "run one scenario config to CSV");
  sim->add_option("--config", config_path, "scenario config file")->required();
  sim->add_option("--out", out_path, "result CSV path")->required();
  sim->add_option("--trace", trace_path, "also write the per-request trace here");

  CLI::App* cal = app.add_subcommand("calibrate", "fit knobs to latency targets");
  cal->add_option("--config", config_path, "scenario config file")->required();
  cal->add_option("--target", target_args, "LABEL=MS, repeatable or comma separated")
      ->required();
  cal->add_option("--knob", knob_args, "NAME=LO:HI, repeatable or comma separated")
      ->required();

  CLI::App* exp = app.add_subcommand("experiment", "run a built-in experiment to CSV");
  exp->add_option("--kind", kind, "ab | c | rescue")
      ->required()
      ->check(CLI::IsMember({"ab", "c", "rescue"}));
  exp->add_option("--out", out_path, "result CSV path")->required();

  CLI::App* prb = app.add_subcommand("probe", "measure RTT against an echo responder");
  prb->add_option("--host", probe_config.host, "target host")->required();
  prb->add_option("--port", probe_config.port, "target port")->required();
  prb->add_option("--count", probe_config.count, "packets to send");
  prb->add_option("--size", probe_config.payload_bytes, "payload bytes (>= 36)");
  prb->add_option("--interval", probe_config.interval_ms, "send spacing, ms");
  prb->add_option("--timeout", probe_config.timeout_ms, "per-packet reply window, ms");
  prb->add_flag("--stream", probe_stream, "use a stream transport instead of datagrams");

  CLI::App* echo = app.add_subcommand("echo", "run the echo responder");
  echo->add_option("--port", echo_port, "port to bind, 0 for ephemeral")->required();
  echo->add_option("--delay", echo_delay_ms, "artificial reply delay, ms");
  echo->add_flag("--stream", echo_stream, "serve stream connections instead of datagrams");

  CLI::App* rep = app.add_subcommand("report", "render a result CSV as text tables");
  rep->add_option("--in", in_path, "result CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_path, trace_path);
    if (cal->parsed()) return cmd_calibrate(config_path, target_args, knob_args);
    if (exp->parsed()) return cmd_experiment(kind, out_path);
    if (prb->parsed()) {
      probe_config.transport =
          probe_stream ? fogsim::Transport::Stream : fogsim::Transport::Datagram;
      return cmd_probe(probe_config);
    }
    if (echo->parsed()) return cmd_echo(echo_port, echo_delay_ms, echo_stream);
    if (rep->parsed()) return cmd_report(in_path);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const fogsim::CalibrationError& e) {
    std::fprintf(stderr, "calibration failed: %s\n", e.what());
    return kExitCalibration;
  } catch (const fogsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
