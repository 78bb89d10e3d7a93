#include "mpsi/waksman.hpp"

#include <bit>
#include <string>

namespace mpsi {

namespace {

bool valid_size(std::uint64_t n) { return n >= 2 && std::has_single_bit(n); }

std::vector<Bus> apply_rec(GateSink& sink, std::span<const Bus> v,
                           std::span<const WireId> controls, std::size_t& pos) {
  const std::size_t n = v.size();
  if (n == 2) {
    auto [a, b] = build_cond_swap(sink, controls[pos++], v[0], v[1]);
    return {std::move(a), std::move(b)};
  }
  const std::size_t half = n / 2;
  std::vector<Bus> top(half);
  std::vector<Bus> bottom(half);
  for (std::size_t k = 0; k < half; ++k) {
    auto [t, b] = build_cond_swap(sink, controls[pos++], v[2 * k], v[2 * k + 1]);
    top[k] = std::move(t);
    bottom[k] = std::move(b);
  }
  const auto top_out = apply_rec(sink, top, controls, pos);
  const auto bottom_out = apply_rec(sink, bottom, controls, pos);
  std::vector<Bus> out(n);
  for (std::size_t k = 0; k + 1 < half; ++k) {
    auto [a, b] = build_cond_swap(sink, controls[pos++], top_out[k], bottom_out[k]);
    out[2 * k] = std::move(a);
    out[2 * k + 1] = std::move(b);
  }
  out[n - 2] = top_out[half - 1];
  out[n - 1] = bottom_out[half - 1];
  return out;
}

void route_rec(std::span<const std::uint32_t> pi, BitVec& out) {
  const std::size_t n = pi.size();
  if (n == 2) {
    out.push_back(pi[0] == 1 ? 1 : 0);
    return;
  }
  const std::size_t half = n / 2;
  std::vector<std::uint32_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[pi[i]] = static_cast<std::uint32_t>(i);

  // side[i]: 0 if input i passes through the top subnetwork, 1 for bottom.
  // Inputs sharing an input switch take different sides, and so do the
  // sources of outputs sharing an output switch.
  std::vector<int> side(n, -1);
  auto walk = [&](std::uint32_t i, int s) {
    while (side[i] == -1) {
      side[i] = s;
      const std::uint32_t partner = i ^ 1u;
      side[partner] = 1 - s;
      i = inv[pi[partner] ^ 1u];
    }
  };
  // The last output pair has no switch: output n-1 is wired to the bottom.
  walk(inv[n - 1], 1);
  for (std::uint32_t i = 0; i < n; i += 2) {
    if (side[i] == -1) walk(i, 0);
  }

  std::vector<std::uint32_t> top(half);
  std::vector<std::uint32_t> bottom(half);
  const std::size_t in_switches = out.size();
  out.resize(in_switches + half);
  for (std::size_t k = 0; k < half; ++k) {
    out[in_switches + k] = static_cast<std::uint8_t>(side[2 * k]);
    const std::uint32_t up = side[2 * k] == 0 ? 2 * k : 2 * k + 1;
    top[k] = pi[up] / 2;
    bottom[k] = pi[up ^ 1u] / 2;
  }
  route_rec(top, out);
  route_rec(bottom, out);
  for (std::size_t k = 0; k + 1 < half; ++k) {
    out.push_back(static_cast<std::uint8_t>(side[inv[2 * k]]));
  }
}

}  // namespace

std::uint64_t waksman_switch_count(std::uint64_t n) {
  if (!valid_size(n)) {
    throw std::invalid_argument("waksman network size must be a power of two >= 2");
  }
  const std::uint64_t log_n = static_cast<std::uint64_t>(std::countr_zero(n));
  return n * log_n - n + 1;
}

std::vector<Bus> build_waksman(GateSink& sink, std::span<const Bus> values,
                               std::span<const WireId> controls) {
  const std::uint64_t expected = waksman_switch_count(values.size());
  if (controls.size() != expected) {
    throw CircuitError("build_waksman: expected " + std::to_string(expected) +
                       " control wires, got " + std::to_string(controls.size()));
  }
  std::size_t pos = 0;
  return apply_rec(sink, values, controls, pos);
}

WaksmanPlan route_waksman(std::span<const std::uint32_t> pi) {
  if (!valid_size(pi.size())) {
    throw std::invalid_argument("route_waksman: size must be a power of two >= 2");
  }
  std::vector<std::uint8_t> seen(pi.size(), 0);
  for (std::uint32_t p : pi) {
    if (p >= pi.size() || seen[p]) {
      throw std::invalid_argument("route_waksman: input is not a permutation");
    }
    seen[p] = 1;
  }
  WaksmanPlan plan;
  plan.size = pi.size();
  plan.switch_controls.reserve(waksman_switch_count(pi.size()));
  route_rec(pi, plan.switch_controls);
  return plan;
}

}  // namespace mpsi
