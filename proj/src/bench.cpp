#include "mpsi/bench.hpp"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mpsi/blocks.hpp"
#include "mpsi/config.hpp"
#include "mpsi/garble.hpp"
#include "mpsi/session.hpp"

namespace mpsi {

namespace {

struct GateRow {
  std::uint32_t log_n;
  bool hashed;
  GateReference ref;
};

constexpr GateRow kGateTable[] = {
    {12, false, {1826, 120}}, {16, false, {2628, 160}}, {20, false, {3946, 200}},
    {12, true, {2175, 143}},  {16, true, {3235, 197}},  {20, true, {4972, 252}},
};

struct TrafficRow {
  std::uint32_t m;
  std::uint32_t log_n;
  TrafficReference ref;
};

constexpr TrafficRow kTrafficTable[] = {
    {3, 8, {0.48, 20.19}},  {3, 12, {5.29, 408.46}},  {3, 16, {102.93, 6832.88}},
    {5, 8, {0.81, 68.77}},  {5, 12, {12.32, 1432.14}}, {5, 16, {230.17, 32977.2}},
    {7, 8, {1.33, 160.18}}, {7, 12, {19.36, 2801.66}}, {7, 16, {377.41, 82886.3}},
    {9, 8, {1.93, 237.32}}, {9, 12, {26.43, 3720.98}}, {9, 16, {514.65, 126341.9}},
};

std::uint32_t log2_exact(std::uint32_t n) {
  return std::has_single_bit(n) ? static_cast<std::uint32_t>(std::countr_zero(n)) : 0;
}

// n distinct nonzero sigma-bit elements per party, the first n/2 shared.
std::vector<PartyInput> planted_sets(const CircuitParams& p) {
  Prg prg(Label{0x6265'6e63'6873'6574ULL, p.parties * 1000003ULL + p.set_size});
  const std::uint64_t mask = p.sigma >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << p.sigma) - 1;
  std::set<Element> used;
  auto fresh = [&] {
    for (;;) {
      const Element e = prg.next_u64() & mask;
      if (e != 0 && used.insert(e).second) return e;
    }
  };
  std::vector<Element> common(p.set_size / 2);
  for (auto& e : common) e = fresh();
  std::vector<PartyInput> inputs(p.parties);
  for (auto& in : inputs) {
    in.set = common;
    while (in.set.size() < p.set_size) in.set.push_back(fresh());
  }
  return inputs;
}

std::string fmt(double v, int precision) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << v;
  return out.str();
}

template <typename T>
std::string opt_str(const std::optional<T>& v, int precision = 2) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return fmt(*v, precision);
  } else {
    return std::to_string(*v);
  }
}

}  // namespace

std::optional<GateReference> reference_gates(std::uint32_t m, std::uint32_t n, std::uint32_t sigma,
                                             bool sigma_auto) {
  if (m != 3) return std::nullopt;
  const std::uint32_t log_n = log2_exact(n);
  for (const auto& row : kGateTable) {
    if (row.log_n != log_n) continue;
    if (row.hashed && sigma == auto_sigma(n) && sigma_auto) return row.ref;
    if (!row.hashed && sigma == 32 && !sigma_auto) return row.ref;
  }
  return std::nullopt;
}

std::optional<TrafficReference> reference_traffic(std::uint32_t m, std::uint32_t n,
                                                  std::uint32_t sigma) {
  if (sigma != 32) return std::nullopt;
  for (const auto& row : kTrafficTable) {
    if (row.m == m && row.log_n == log2_exact(n)) return row.ref;
  }
  return std::nullopt;
}

BenchRow bench_point(const CircuitParams& params, bool sigma_auto, bool live, OtBackend backend) {
  validate_params(params);
  BenchRow row;
  row.params = params;
  row.sigma_auto = sigma_auto;
  row.stats = count_ex_scs(params);
  row.per_element = static_cast<double>(row.stats.and_count) / params.set_size;
  row.table_bytes = garbled_table_bytes(row.stats);
  if (auto g = reference_gates(params.parties, params.set_size, params.sigma, sigma_auto)) {
    row.ref_gates_per_element = g->gates_per_element;
    row.ref_depth = g->depth;
  }
  if (auto t = reference_traffic(params.parties, params.set_size, params.sigma)) {
    row.ref_seconds = t->seconds;
    row.ref_megabytes = t->megabytes;
  }
  if (live) {
    if (params.sigma > 64) throw std::invalid_argument("live runs need sigma <= 64");
    SimulationOptions opt{params, backend, Transport::kInProcess};
    const auto results = simulate_session(opt, planted_sets(params));
    LiveMeasurement lm;
    lm.p1_to_p2_bytes = results[0].traffic.at(2).bytes_sent;
    lm.p2_to_p1_bytes = results[1].traffic.at(1).bytes_sent;
    lm.garbled_bytes = results[0].garbled_bytes;
    for (const auto& r : results) lm.seconds = std::max(lm.seconds, r.seconds);
    row.live = lm;
  }
  return row;
}

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (std::uint32_t m : options.ms) {
    for (std::uint32_t n : options.ns) {
      for (const auto& s : options.sigmas) {
        const bool is_auto = s == "auto";
        std::uint32_t sigma = 0;
        if (is_auto) {
          if (n < 2 || !std::has_single_bit(n)) throw std::invalid_argument("n must be a power of two");
          sigma = auto_sigma(n);
        } else {
          try {
            sigma = static_cast<std::uint32_t>(std::stoul(s));
          } catch (const std::exception&) {
            throw std::invalid_argument("bad sigma '" + s + "'");
          }
        }
        rows.push_back(bench_point(CircuitParams{m, n, sigma, options.mode, options.compaction},
                                   is_auto, options.live, options.ot_backend));
      }
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "m,n,sigma,mode,compaction,and_count,and_depth,total_gates,and_per_element,"
         "garbled_table_bytes,ref_and_per_element,ref_depth,ref_seconds,ref_megabytes,"
         "live_p1_to_p2_bytes,live_p2_to_p1_bytes,live_garbled_bytes,live_seconds\n";
  for (const auto& r : rows) {
    out << r.params.parties << ',' << r.params.set_size << ',' << r.params.sigma << ','
        << output_mode_name(r.params.mode) << ',' << compaction_name(r.params.compaction) << ','
        << r.stats.and_count << ',' << r.stats.and_depth << ',' << r.stats.total_gates << ','
        << fmt(r.per_element, 2) << ',' << r.table_bytes << ',' << opt_str(r.ref_gates_per_element)
        << ',' << opt_str(r.ref_depth) << ',' << opt_str(r.ref_seconds) << ','
        << opt_str(r.ref_megabytes);
    if (r.live) {
      out << ',' << r.live->p1_to_p2_bytes << ',' << r.live->p2_to_p1_bytes << ','
          << r.live->garbled_bytes << ',' << fmt(r.live->seconds, 3);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string bench_text(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(4) << "m" << std::setw(9) << "n" << std::setw(7) << "sigma"
      << std::setw(7) << "comp" << std::right << std::setw(14) << "ANDs" << std::setw(11)
      << "AND/elem" << std::setw(9) << "(ref)" << std::setw(8) << "depth" << std::setw(7)
      << "(ref)" << std::setw(13) << "tables MB" << std::setw(11) << "(ref MB)";
  const bool any_live = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.live.has_value(); });
  if (any_live) out << std::setw(12) << "P1->P2 MB" << std::setw(10) << "P2->P1 KB" << std::setw(9) << "time s";
  out << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(4) << r.params.parties << std::setw(9) << r.params.set_size
        << std::setw(7) << (std::to_string(r.params.sigma) + (r.sigma_auto ? "*" : ""))
        << std::setw(7) << compaction_name(r.params.compaction) << std::right << std::setw(14)
        << r.stats.and_count << std::setw(11) << fmt(r.per_element, 1) << std::setw(9)
        << opt_str(r.ref_gates_per_element) << std::setw(8) << r.stats.and_depth << std::setw(7)
        << opt_str(r.ref_depth) << std::setw(13) << fmt(r.table_bytes / 1e6, 2) << std::setw(11)
        << opt_str(r.ref_megabytes);
    if (r.live) {
      out << std::setw(12) << fmt(r.live->p1_to_p2_bytes / 1e6, 2) << std::setw(10)
          << fmt(r.live->p2_to_p1_bytes / 1e3, 1) << std::setw(9) << fmt(r.live->seconds, 2);
    }
    out << '\n';
  }
  if (std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.sigma_auto; })) {
    out << "* sigma = 40 + 2 log2 n - 1 (hashed elements)\n";
  }
  return out.str();
}

CounterCost counter_cost(std::uint32_t n) {
  if (n < 2 || !std::has_single_bit(n)) throw std::invalid_argument("n must be a power of two >= 2");
  CostCounter sink;
  std::vector<WireId> bits(n);
  for (auto& b : bits) b = sink.input(InputOwner::kEvaluator);
  for (WireId w : build_counter(sink, bits)) sink.output(w);
  const std::uint64_t log_n = static_cast<std::uint64_t>(std::countr_zero(n));
  return CounterCost{n, sink.stats().and_count, std::uint64_t{n} * log_n - n};
}

}  // namespace mpsi
