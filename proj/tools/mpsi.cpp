// mpsi: multi-party private set intersection from the command line.
//
//   mpsi run       --config party.conf --input tokens.txt
//   mpsi simulate  --input a.txt --input b.txt --input c.txt
//   mpsi anomaly   --window w.txt --blacklist peer1.txt --threshold 0.4
//   mpsi bench     --bench-n 4096,65536 --bench-m 3 --bench-sigma 32,auto
//
// Exit codes: 0 ok, 1 protocol abort, 2 input error.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "mpsi/anomaly.hpp"
#include "mpsi/bench.hpp"
#include "mpsi/config.hpp"
#include "mpsi/encode.hpp"
#include "mpsi/session.hpp"

namespace {

using namespace mpsi;

constexpr int kExitOk = 0;
constexpr int kExitAbort = 1;
constexpr int kExitInput = 2;

void print_result(const PsiResult& r, const std::map<Element, std::string>& own_tokens) {
  if (r.has_intersection) {
    std::cout << "intersection (" << r.intersection.size() << "):\n";
    for (Element e : r.intersection) {
      std::cout << "  " << e;
      if (auto it = own_tokens.find(e); it != own_tokens.end()) std::cout << '\t' << it->second;
      std::cout << '\n';
    }
  }
  if (r.cardinality) std::cout << "cardinality: " << *r.cardinality << '\n';
}

void print_verdict(const AnomalyVerdict& v) {
  std::cout << v.peer << ": |A|=" << v.own_size << " |B|=" << v.peer_size << " c=" << v.intersection
            << " jaccard=" << v.jaccard.str() << " (" << v.jaccard.to_double() << ") t="
            << v.threshold.str() << " -> " << verdict_name(v.label) << '\n';
}

std::vector<std::uint32_t> parse_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    if (!item.empty()) {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
      out.push_back(static_cast<std::uint32_t>(v));
    }
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    if (comma > pos) out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

struct RunArgs {
  std::string config;
  std::string input;
  std::string mode;
  int timeout = 60;
};

int cmd_run(const RunArgs& a) {
  SessionConfig config = load_config(a.config);
  if (!a.mode.empty()) config.mode = parse_output_mode(a.mode);
  const auto tokens = load_tokens(a.input);
  const EncodedSet own = encode_elements(tokens, config.sigma);
  PartyInput input{pad_set(own.elements, config.n, config.sigma, config.party_id, config.m),
                   own.elements.size()};
  const PsiResult r = run_party_tcp(config, input, std::chrono::seconds(a.timeout));
  print_result(r, own.tokens);
  return kExitOk;
}

struct SimulateArgs {
  std::vector<std::string> inputs;
  std::string mode = "intersection";
  std::string sigma = "auto";
  std::uint32_t n = 0;
  std::string ot = "real";
  std::string transport = "inproc";
  std::string compaction = "sort";
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.inputs.size() < 2) throw InputError("simulate needs at least two --input files");
  std::vector<std::vector<std::string>> tokens;
  std::size_t largest = 0;
  for (const auto& path : a.inputs) {
    tokens.push_back(load_tokens(path));
    if (tokens.back().empty()) throw InputError(path + " has no tokens");
    largest = std::max(largest, tokens.back().size());
  }
  const std::uint32_t n = a.n != 0 ? a.n : session_size_for(largest);
  const std::uint32_t sigma = resolve_sigma(a.sigma, n);
  const auto m = static_cast<std::uint32_t>(a.inputs.size());

  SimulationOptions opt;
  opt.params = CircuitParams{m, n, sigma, parse_output_mode(a.mode), parse_compaction(a.compaction)};
  opt.ot_backend = parse_ot_backend(a.ot);
  if (a.transport == "tcp") {
    opt.transport = Transport::kTcp;
  } else if (a.transport != "inproc") {
    throw InputError("transport must be inproc or tcp");
  }
  std::vector<PartyInput> inputs;
  std::map<Element, std::string> names;
  for (std::uint32_t k = 0; k < m; ++k) {
    const EncodedSet enc = encode_elements(tokens[k], sigma);
    names.insert(enc.tokens.begin(), enc.tokens.end());
    inputs.push_back({pad_set(enc.elements, n, sigma, k + 1, m), enc.elements.size()});
  }
  const auto results = simulate_session(opt, inputs);
  std::cout << "parties=" << m << " n=" << n << " sigma=" << sigma << " ANDs=" << results[0].and_count
            << " P1->P2 bytes=" << results[0].traffic.at(2).bytes_sent << '\n';
  print_result(results[0], names);
  return kExitOk;
}

struct AnomalyArgs {
  std::string config;
  std::string window;
  std::vector<std::string> blacklists;
  std::string threshold;
  std::string sigma = "auto";
  std::string ot = "real";
  int timeout = 60;
};

int cmd_anomaly(const AnomalyArgs& a) {
  const Rational t = parse_threshold(a.threshold);
  const auto window = load_tokens(a.window);
  if (window.empty()) throw InputError("the traffic window is empty");

  if (!a.config.empty()) {
    // Networked: one cardinality session against the other party of the config.
    const SessionConfig config = load_config(a.config);
    if (config.m != 2) throw InputError("anomaly sessions are pairwise: m must be 2");
    if (!reveals_cardinality(config.mode)) throw InputError("anomaly needs mode=cardinality");
    const EncodedSet own = encode_elements(window, config.sigma);
    PartyInput input{pad_set(own.elements, config.n, config.sigma, config.party_id, 2),
                     own.elements.size()};
    const PsiResult r = run_party_tcp(config, input, std::chrono::seconds(a.timeout));
    const std::uint32_t other = config.party_id == 1 ? 2 : 1;
    print_verdict(judge("party" + std::to_string(other), r.cardinality.value(),
                        r.declared_sizes.at(config.party_id), r.declared_sizes.at(other), t));
    return kExitOk;
  }

  if (a.blacklists.empty()) throw InputError("give --config or at least one --blacklist");
  std::vector<std::vector<std::string>> lists;
  for (const auto& path : a.blacklists) lists.push_back(load_tokens(path));
  for (const auto& v : detect_local(window, lists, a.blacklists, t, a.sigma, parse_ot_backend(a.ot))) {
    print_verdict(v);
  }
  return kExitOk;
}

struct BenchArgs {
  std::string ns = "4096";
  std::string ms = "3";
  std::string sigmas = "32";
  std::string mode = "intersection";
  std::string compaction = "sort";
  std::string csv;
  bool live = false;
  bool counter = false;
  std::string ot = "real";
};

int cmd_bench(const BenchArgs& a) {
  BenchOptions opt;
  opt.ns = parse_list(a.ns);
  opt.ms = parse_list(a.ms);
  opt.sigmas = split(a.sigmas);
  opt.mode = parse_output_mode(a.mode);
  opt.compaction = parse_compaction(a.compaction);
  opt.live = a.live;
  opt.ot_backend = parse_ot_backend(a.ot);
  const auto rows = run_bench(opt);
  if (a.csv == "-") {
    // Stdout carries only the CSV so it can be piped.
    std::cout << bench_csv(rows);
    return kExitOk;
  }
  std::cout << bench_text(rows);
  if (a.counter) {
    std::cout << "\ncounter ANDs vs n log2 n - n:\n";
    for (std::uint32_t n : opt.ns) {
      const CounterCost c = counter_cost(n);
      std::cout << "  n=" << c.n << "  measured=" << c.and_count << "  formula=" << c.formula << '\n';
    }
  }
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    if (!f) throw InputError("cannot write " + a.csv);
    f << bench_csv(rows);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-party private set intersection over garbled circuits"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one party of a networked session");
  run_cmd->add_option("--config", run.config, "Session config (key=value)")->required();
  run_cmd->add_option("--input", run.input, "Token file, one per line")->required();
  run_cmd->add_option("--mode", run.mode, "Override mode: intersection | cardinality | both");
  run_cmd->add_option("--timeout", run.timeout, "Connection timeout in seconds");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run all parties in this process");
  sim_cmd->add_option("--input", sim.inputs, "Token file per party, in party order")->required();
  sim_cmd->add_option("--mode", sim.mode, "intersection | cardinality | both");
  sim_cmd->add_option("--sigma", sim.sigma, "Element bits or 'auto'");
  sim_cmd->add_option("--n", sim.n, "Set size (power of two); default fits the largest input");
  sim_cmd->add_option("--ot", sim.ot, "OT backend: real | dealer");
  sim_cmd->add_option("--transport", sim.transport, "inproc | tcp");
  sim_cmd->add_option("--compaction", sim.compaction, "sort | shift");

  AnomalyArgs an;
  auto* an_cmd = app.add_subcommand("anomaly", "Jaccard verdicts of a traffic window against blacklists");
  an_cmd->add_option("--window", an.window, "Token file of the traffic window")->required();
  an_cmd->add_option("--threshold", an.threshold, "Threshold t in [0,1], decimal or p/q")->required();
  an_cmd->add_option("--blacklist", an.blacklists, "Peer blacklist token file (local run)");
  an_cmd->add_option("--config", an.config, "Two-party cardinality config (networked run)");
  an_cmd->add_option("--sigma", an.sigma, "Element bits or 'auto' (local run)");
  an_cmd->add_option("--ot", an.ot, "OT backend: real | dealer (local run)");
  an_cmd->add_option("--timeout", an.timeout, "Connection timeout in seconds");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Gate counts and traffic over a parameter sweep");
  bench_cmd->add_option("--bench-n", bench.ns, "Comma-separated set sizes");
  bench_cmd->add_option("--bench-m", bench.ms, "Comma-separated party counts");
  bench_cmd->add_option("--bench-sigma", bench.sigmas, "Comma-separated element bits, or 'auto'");
  bench_cmd->add_option("--mode", bench.mode, "intersection | cardinality | both");
  bench_cmd->add_option("--compaction", bench.compaction, "sort | shift");
  bench_cmd->add_option("--csv", bench.csv, "Write CSV to a file, or '-' for stdout");
  bench_cmd->add_flag("--live", bench.live, "Also run each point in-process and measure traffic");
  bench_cmd->add_flag("--counter", bench.counter, "Report the Hamming-weight counter cost");
  bench_cmd->add_option("--ot", bench.ot, "OT backend for --live: real | dealer");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*an_cmd) return cmd_anomaly(an);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const ProtocolError& e) {
    std::cerr << "mpsi: abort: " << e.what() << '\n';
    return kExitAbort;
  } catch (const std::exception& e) {
    std::cerr << "mpsi: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
