#include "mpsi/blocks.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <stdexcept>
#include <string>

namespace mpsi {

namespace {

void require_same_width(const Bus& x, const Bus& y, const char* what) {
  if (x.size() != y.size()) {
    throw CircuitError(std::string(what) + ": bus widths differ (" + std::to_string(x.size()) +
                       " vs " + std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw CircuitError(std::string(what) + ": empty bus");
}

bool is_pow2(std::size_t n) { return n != 0 && std::has_single_bit(n); }

WireId and_tree(GateSink& sink, std::vector<WireId> bits) {
  while (bits.size() > 1) {
    std::vector<WireId> next;
    next.reserve((bits.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < bits.size(); i += 2) {
      next.push_back(sink.and_gate(bits[i], bits[i + 1]));
    }
    if (bits.size() % 2 == 1) next.push_back(bits.back());
    bits = std::move(next);
  }
  return bits.front();
}

// A value on a bus together with the largest integer it can hold; bits above
// bus.size() are known to be zero.
struct Counted {
  Bus bits;
  std::uint64_t max = 0;
};

Counted add_counted(GateSink& sink, const Counted& a, const Counted& b) {
  const std::uint64_t max = a.max + b.max;
  const std::size_t width = static_cast<std::size_t>(std::bit_width(max));
  Counted r;
  r.max = max;
  std::optional<WireId> carry;
  for (std::size_t i = 0; i < width; ++i) {
    std::optional<WireId> x;
    std::optional<WireId> y;
    if (i < a.bits.size()) x = a.bits[i];
    if (i < b.bits.size()) y = b.bits[i];
    std::vector<WireId> present;
    for (const auto& w : {x, y, carry}) {
      if (w) present.push_back(*w);
    }
    if (present.empty()) {
      r.bits.push_back(sink.constant(false));
      carry.reset();
      continue;
    }
    WireId sum = present[0];
    for (std::size_t k = 1; k < present.size(); ++k) sum = sink.xor_gate(sum, present[k]);
    r.bits.push_back(sum);
    if (i + 1 == width) break;
    if (present.size() == 3) {
      // majority(x, y, c) = c ^ ((x ^ c) & (y ^ c))
      const WireId c = present[2];
      const WireId t = sink.and_gate(sink.xor_gate(present[0], c), sink.xor_gate(present[1], c));
      carry = sink.xor_gate(c, t);
    } else if (present.size() == 2) {
      carry = sink.and_gate(present[0], present[1]);
    } else {
      carry.reset();
    }
  }
  return r;
}

std::vector<Bus> compact_by_sorting(GateSink& sink, std::span<const Bus> values) {
  return build_bitonic_sort(sink, values);
}

// Each nonzero entry moves right by the number of dummies to its right, one
// power of two per level, lowest bit first. Entries never collide, so a level
// is new[p] = E[p] ^ t[p] ^ t[p - stride] with t[p] = move[p] & E[p], where E
// is the element together with its not yet consumed shift bits.
std::vector<Bus> compact_by_shifting(GateSink& sink, std::span<const Bus> values) {
  using OptBits = std::vector<std::optional<WireId>>;
  const std::size_t n = values.size();
  const std::size_t sigma = values.front().size();
  const std::size_t levels = static_cast<std::size_t>(std::countr_zero(n));

  auto xor_into = [&sink](std::optional<WireId>& acc, std::optional<WireId> w) {
    if (!w) return;
    acc = acc ? sink.xor_gate(*acc, *w) : *w;
  };

  std::vector<WireId> valid(n);
  for (std::size_t p = 0; p < n; ++p) valid[p] = build_nonzero(sink, values[p]);

  // shift[p] = number of dummies right of p, forced to zero on dummies.
  std::vector<OptBits> shift(n, OptBits(levels));
  Counted suffix;
  for (std::size_t p = n; p-- > 0;) {
    for (std::size_t b = 0; b < suffix.bits.size(); ++b) {
      shift[p][b] = sink.and_gate(suffix.bits[b], valid[p]);
    }
    if (p > 0) suffix = add_counted(sink, suffix, Counted{{sink.inv_gate(valid[p])}, 1});
  }

  std::vector<Bus> value(values.begin(), values.end());
  for (std::size_t j = 0; j < levels; ++j) {
    const std::size_t stride = std::size_t{1} << j;
    struct Outgoing {
      Bus value;
      OptBits shift;
    };
    std::vector<std::optional<Outgoing>> out(n);
    for (std::size_t p = 0; p + stride < n; ++p) {
      if (!shift[p][j]) continue;
      const WireId m = *shift[p][j];
      Outgoing o{Bus(sigma), OptBits(levels)};
      for (std::size_t b = 0; b < sigma; ++b) o.value[b] = sink.and_gate(m, value[p][b]);
      for (std::size_t k = j + 1; k < levels; ++k) {
        if (shift[p][k]) o.shift[k] = sink.and_gate(m, *shift[p][k]);
      }
      out[p] = std::move(o);
    }
    std::vector<Bus> next_value(n);
    std::vector<OptBits> next_shift(n, OptBits(levels));
    for (std::size_t p = 0; p < n; ++p) {
      Bus v = value[p];
      OptBits s(levels);
      for (std::size_t k = j + 1; k < levels; ++k) s[k] = shift[p][k];
      for (const std::optional<Outgoing>* o : {&out[p], p >= stride ? &out[p - stride] : nullptr}) {
        if (o == nullptr || !*o) continue;
        for (std::size_t b = 0; b < sigma; ++b) v[b] = sink.xor_gate(v[b], (*o)->value[b]);
        for (std::size_t k = j + 1; k < levels; ++k) xor_into(s[k], (*o)->shift[k]);
      }
      next_value[p] = std::move(v);
      next_shift[p] = std::move(s);
    }
    value = std::move(next_value);
    shift = std::move(next_shift);
  }
  return value;
}

}  // namespace

Bus constant_bus(GateSink& sink, std::size_t width, std::uint64_t value) {
  Bus bus(width);
  for (std::size_t i = 0; i < width; ++i) {
    bus[i] = sink.constant(i < 64 && ((value >> i) & 1));
  }
  return bus;
}

WireId build_gt(GateSink& sink, const Bus& x, const Bus& y) {
  require_same_width(x, y, "build_gt");
  // c_{i+1} = x_i ^ ((x_i ^ c_i) & (y_i ^ c_i)), c_0 = 0; c_sigma = [x > y].
  WireId carry = sink.xor_gate(x[0], sink.and_gate(x[0], y[0]));
  for (std::size_t i = 1; i < x.size(); ++i) {
    const WireId t = sink.and_gate(sink.xor_gate(x[i], carry), sink.xor_gate(y[i], carry));
    carry = sink.xor_gate(x[i], t);
  }
  return carry;
}

WireId build_eq(GateSink& sink, const Bus& x, const Bus& y) {
  require_same_width(x, y, "build_eq");
  std::vector<WireId> same(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    same[i] = sink.inv_gate(sink.xor_gate(x[i], y[i]));
  }
  return and_tree(sink, std::move(same));
}

WireId build_or(GateSink& sink, WireId a, WireId b) {
  return sink.xor_gate(sink.xor_gate(a, b), sink.and_gate(a, b));
}

WireId build_nonzero(GateSink& sink, const Bus& x) {
  if (x.empty()) throw CircuitError("build_nonzero: empty bus");
  std::vector<WireId> bits(x.begin(), x.end());
  while (bits.size() > 1) {
    std::vector<WireId> next;
    for (std::size_t i = 0; i + 1 < bits.size(); i += 2) {
      next.push_back(build_or(sink, bits[i], bits[i + 1]));
    }
    if (bits.size() % 2 == 1) next.push_back(bits.back());
    bits = std::move(next);
  }
  return bits.front();
}

Bus build_mux(GateSink& sink, WireId s, const Bus& x, const Bus& y) {
  require_same_width(x, y, "build_mux");
  Bus out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = sink.xor_gate(y[i], sink.and_gate(s, sink.xor_gate(x[i], y[i])));
  }
  return out;
}

std::pair<Bus, Bus> build_cond_swap(GateSink& sink, WireId s, const Bus& x, const Bus& y) {
  require_same_width(x, y, "build_cond_swap");
  Bus a(x.size());
  Bus b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const WireId t = sink.and_gate(s, sink.xor_gate(x[i], y[i]));
    a[i] = sink.xor_gate(x[i], t);
    b[i] = sink.xor_gate(y[i], t);
  }
  return {std::move(a), std::move(b)};
}

std::pair<Bus, Bus> build_2sorter(GateSink& sink, const Bus& x, const Bus& y) {
  require_same_width(x, y, "build_2sorter");
  return build_cond_swap(sink, build_gt(sink, x, y), x, y);
}

DupSelection build_3dupselection(GateSink& sink, const Bus& a, const Bus& b, const Bus& c) {
  require_same_width(a, b, "build_3dupselection");
  require_same_width(b, c, "build_3dupselection");
  const WireId match = build_or(sink, build_eq(sink, a, b), build_eq(sink, b, c));
  Bus out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = sink.and_gate(match, b[i]);
  return {std::move(out), match};
}

std::vector<Bus> build_bitonic_merger(GateSink& sink, std::span<const Bus> a,
                                      std::span<const Bus> b) {
  if (a.size() != b.size() || !is_pow2(a.size())) {
    throw CircuitError("build_bitonic_merger: inputs must have equal power-of-two lengths (got " +
                       std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  }
  std::vector<Bus> seq(a.begin(), a.end());
  seq.insert(seq.end(), b.rbegin(), b.rend());
  const std::size_t total = seq.size();
  for (std::size_t stride = total / 2; stride >= 1; stride /= 2) {
    for (std::size_t i = 0; i < total; ++i) {
      if (i & stride) continue;
      auto [lo, hi] = build_2sorter(sink, seq[i], seq[i + stride]);
      seq[i] = std::move(lo);
      seq[i + stride] = std::move(hi);
    }
  }
  return seq;
}

std::vector<Bus> build_bitonic_sort(GateSink& sink, std::span<const Bus> values) {
  if (!is_pow2(values.size())) {
    throw CircuitError("build_bitonic_sort: length must be a power of two");
  }
  if (values.size() == 1) return {values.front()};
  const std::size_t half = values.size() / 2;
  const auto lo = build_bitonic_sort(sink, values.first(half));
  const auto hi = build_bitonic_sort(sink, values.subspan(half));
  return build_bitonic_merger(sink, lo, hi);
}

std::string_view compaction_name(Compaction kind) {
  return kind == Compaction::kSortingNetwork ? "sort" : "shift";
}

Compaction parse_compaction(std::string_view text) {
  if (text == "sort") return Compaction::kSortingNetwork;
  if (text == "shift") return Compaction::kShiftNetwork;
  throw std::invalid_argument("unknown compaction '" + std::string(text) + "' (sort | shift)");
}

std::vector<Bus> build_compaction(GateSink& sink, std::span<const Bus> values, Compaction kind) {
  if (!is_pow2(values.size())) {
    throw CircuitError("build_compaction: length must be a power of two");
  }
  for (const Bus& v : values) require_same_width(values.front(), v, "build_compaction");
  if (values.size() == 1) return {values.front()};
  switch (kind) {
    case Compaction::kSortingNetwork:
      return compact_by_sorting(sink, values);
    case Compaction::kShiftNetwork:
      return compact_by_shifting(sink, values);
  }
  throw CircuitError("build_compaction: unknown strategy");
}

Bus build_counter(GateSink& sink, std::span<const WireId> bits) {
  if (bits.empty()) throw CircuitError("build_counter: needs at least one bit");
  std::vector<Counted> level;
  level.reserve(bits.size());
  for (WireId w : bits) level.push_back(Counted{{w}, 1});
  while (level.size() > 1) {
    std::vector<Counted> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      next.push_back(add_counted(sink, level[i], level[i + 1]));
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return std::move(level.front().bits);
}

}  // namespace mpsi
