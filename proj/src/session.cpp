#include "mpsi/session.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "mpsi/garble.hpp"
#include "mpsi/ot.hpp"
#include "mpsi/waksman.hpp"

namespace mpsi {

namespace {

constexpr std::size_t kHelloBytes = 4 + 32 + 8;

std::uint64_t element_mask(std::uint32_t sigma) {
  return sigma >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << sigma) - 1;
}

std::uint64_t declared_of(const PartyInput& input) {
  return input.declared_size.value_or(input.set.size());
}

FrameChannel& peer(PeerLinks& links, std::uint32_t id) {
  const auto it = links.channels.find(id);
  if (it == links.channels.end() || !it->second) {
    throw ProtocolError("no channel to party " + std::to_string(id));
  }
  return *it->second;
}

std::vector<std::uint8_t> serialize_labels(std::span<const Label> labels) {
  std::vector<std::uint8_t> out(kLabelBytes * labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i].store(out.data() + kLabelBytes * i);
  return out;
}

std::vector<Label> deserialize_labels(std::span<const std::uint8_t> bytes) {
  std::vector<Label> out(bytes.size() / kLabelBytes);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Label::load(bytes.data() + kLabelBytes * i);
  return out;
}

// Returns the peer's declared set size.
std::uint64_t check_hello(const Frame& f, const SessionConfig& config, std::uint32_t expected) {
  if (f.type != FrameType::kHello) {
    throw ProtocolError("expected HELLO from party " + std::to_string(expected) + ", got " +
                        std::string(frame_type_name(f.type)));
  }
  if (f.payload.size() != kHelloBytes) throw ProtocolError("frame decode failure: malformed HELLO");
  std::size_t pos = 0;
  const auto id = static_cast<std::uint32_t>(get_be(f.payload, pos, 4));
  if (id != expected) {
    throw ProtocolError("HELLO from party " + std::to_string(id) + " where party " +
                        std::to_string(expected) + " was expected");
  }
  const auto hash = config_hash(config);
  if (!std::equal(hash.begin(), hash.end(), f.payload.begin() + 4)) {
    throw ProtocolError("config-hash mismatch with party " + std::to_string(id));
  }
  pos += 32;
  return get_be(f.payload, pos, 8);
}

void handshake(const SessionConfig& config, std::uint64_t declared, PeerLinks& links,
               PsiResult& result) {
  const auto hello = encode_hello(config, declared);
  const auto peers = peer_ids(config);
  for (std::uint32_t id : peers) {
    if (!links.hello_sent.contains(id)) {
      peer(links, id).send(FrameType::kHello, hello);
      links.hello_sent.insert(id);
    }
  }
  result.declared_sizes[config.party_id] = declared;
  for (std::uint32_t id : peers) {
    Frame f;
    if (auto it = links.pending_hello.find(id); it != links.pending_hello.end()) {
      f = std::move(it->second);
      links.pending_hello.erase(it);
    } else {
      f = peer(links, id).receive();
    }
    result.declared_sizes[id] = check_hello(f, config, id);
  }
}

// Shares of parties 3..m, in party order.
std::vector<std::vector<Element>> collect_shares(const SessionConfig& config, PeerLinks& links) {
  const std::size_t bits = std::size_t{config.n} * config.sigma;
  std::vector<std::vector<Element>> shares;
  for (std::uint32_t id = 3; id <= config.m; ++id) {
    const Frame f = peer(links, id).expect(FrameType::kShares);
    if (f.payload.size() != 4 + (bits + 7) / 8) {
      throw ProtocolError("frame decode failure: SHARES from party " + std::to_string(id) +
                          " has " + std::to_string(f.payload.size()) + " bytes");
    }
    std::size_t pos = 0;
    if (get_be(f.payload, pos, 4) != id) throw ProtocolError("SHARES carries the wrong party id");
    const BitVec unpacked = unpack_bits(std::span(f.payload).subspan(4), bits);
    shares.push_back(elements_from_bits(unpacked, config.sigma));
  }
  return shares;
}

BitVec own_shuffle(const SessionConfig& config) {
  if (!reveals_intersection(config.mode)) return {};
  Prg prg = Prg::from_entropy();
  return route_waksman(random_permutation(config.n, prg)).switch_controls;
}

void fill_from_message(PsiResult& result, const ResultMessage& msg) {
  result.has_intersection = msg.has_intersection;
  result.intersection = msg.intersection;
  result.cardinality = msg.cardinality;
}

void run_contributor(const SessionConfig& config, std::span<const Element> sorted,
                     PeerLinks& links, PsiResult& result) {
  Prg prg = Prg::from_entropy();
  const SharePair shares = make_shares(sorted, config.sigma, prg);
  peer(links, 1).send(FrameType::kShares,
                      encode_shares(config.party_id, shares.to_garbler, config.sigma));
  peer(links, 2).send(FrameType::kShares,
                      encode_shares(config.party_id, shares.to_evaluator, config.sigma));
  fill_from_message(result, decode_result(peer(links, 2).expect(FrameType::kResult).payload));
}

void run_garbler(const SessionConfig& config, std::span<const Element> sorted, PeerLinks& links,
                 PsiResult& result) {
  const auto shares = collect_shares(config, links);
  const PsiCircuit pc = build_ex_scs(config.circuit_params());
  result.and_count = stats(pc.circuit).and_count;
  const BitVec bits =
      assemble_inputs(pc.layout, InputOwner::kGarbler, sorted, shares, own_shuffle(config));

  const InputLabels labels = make_input_labels(pc.circuit, os_random_label());
  FrameChannel& evaluator = peer(links, 2);
  evaluator.send_chunked(FrameType::kGarblerLabels,
                         serialize_labels(encode_inputs(labels, bits, InputOwner::kGarbler)));
  ot_send(config.ot_backend, evaluator, evaluator_label_pairs(labels));

  const DecodeTable decode =
      garble_tables(pc.circuit, labels, [&](std::span<const Label> chunk) {
        const auto bytes = serialize_labels(chunk);
        evaluator.send(FrameType::kGcChunk, bytes);
        result.garbled_bytes += bytes.size();
      });
  evaluator.send(FrameType::kDecodeTable, pack_bits(decode.bits));
  fill_from_message(result, decode_result(evaluator.expect(FrameType::kResult).payload));
}

// Pulls garbled tables out of GC_CHUNK frames as the evaluator asks for them.
class TableReader {
 public:
  TableReader(FrameChannel& channel, std::uint64_t& counter) : channel_(channel), counter_(counter) {}

  void operator()(std::span<Label> out) {
    for (Label& l : out) {
      if (pos_ == chunk_.size()) {
        Frame f = channel_.expect(FrameType::kGcChunk);
        if (f.payload.empty() || f.payload.size() % kLabelBytes != 0) {
          throw ProtocolError("frame decode failure: GC_CHUNK of " +
                              std::to_string(f.payload.size()) + " bytes");
        }
        counter_ += f.payload.size();
        chunk_ = std::move(f.payload);
        pos_ = 0;
      }
      l = Label::load(chunk_.data() + pos_);
      pos_ += kLabelBytes;
    }
  }

  bool drained() const { return pos_ == chunk_.size(); }

 private:
  FrameChannel& channel_;
  std::uint64_t& counter_;
  std::vector<std::uint8_t> chunk_;
  std::size_t pos_ = 0;
};

void run_evaluator(const SessionConfig& config, std::span<const Element> sorted, PeerLinks& links,
                   PsiResult& result) {
  const auto shares = collect_shares(config, links);
  const PsiCircuit pc = build_ex_scs(config.circuit_params());
  result.and_count = stats(pc.circuit).and_count;
  const BitVec bits =
      assemble_inputs(pc.layout, InputOwner::kEvaluator, sorted, shares, own_shuffle(config));

  FrameChannel& garbler = peer(links, 1);
  const auto garbler_active = deserialize_labels(garbler.receive_chunked(
      FrameType::kGarblerLabels, kLabelBytes * pc.circuit.garbler_inputs().size()));
  const auto evaluator_active = ot_receive(config.ot_backend, garbler, bits);

  TableReader reader(garbler, result.garbled_bytes);
  const auto output_labels = evaluate(
      pc.circuit, [&](std::span<Label> out) { reader(out); }, garbler_active, evaluator_active);
  if (!reader.drained()) throw ProtocolError("garbled table stream has trailing material");

  const Frame table = garbler.expect(FrameType::kDecodeTable);
  const std::size_t outputs = pc.circuit.outputs().size();
  if (table.payload.size() != (outputs + 7) / 8) {
    throw ProtocolError("frame decode failure: DECODE_TABLE size");
  }
  const BitVec out_bits = decode_outputs(DecodeTable{unpack_bits(table.payload, outputs)}, output_labels);
  const PsiOutputs decoded = read_outputs(config.circuit_params(), out_bits);

  ResultMessage msg;
  msg.has_intersection = reveals_intersection(config.mode);
  msg.cardinality = decoded.cardinality;
  for (Element e : decoded.slots) {
    if (e != 0) msg.intersection.push_back(e);
  }
  std::sort(msg.intersection.begin(), msg.intersection.end());
  const auto payload = encode_result(msg);
  for (std::uint32_t id : peer_ids(config)) peer(links, id).send(FrameType::kResult, payload);
  fill_from_message(result, msg);
}

}  // namespace

std::vector<std::uint8_t> encode_result(const ResultMessage& r) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>((r.has_intersection ? 1 : 0) | (r.cardinality ? 2 : 0)));
  put_be(out, r.cardinality.value_or(0), 8);
  put_be(out, r.intersection.size(), 4);
  for (Element e : r.intersection) put_be(out, e, 8);
  return out;
}

ResultMessage decode_result(std::span<const std::uint8_t> payload) {
  std::size_t pos = 0;
  const auto flags = get_be(payload, pos, 1);
  if (flags > 3) throw ProtocolError("frame decode failure: RESULT flags");
  ResultMessage r;
  r.has_intersection = flags & 1;
  const std::uint64_t card = get_be(payload, pos, 8);
  if (flags & 2) r.cardinality = card;
  const std::uint64_t count = get_be(payload, pos, 4);
  if (payload.size() != pos + 8 * count) throw ProtocolError("frame decode failure: RESULT length");
  for (std::uint64_t i = 0; i < count; ++i) r.intersection.push_back(get_be(payload, pos, 8));
  return r;
}

std::vector<std::uint8_t> encode_hello(const SessionConfig& config, std::uint64_t declared_size) {
  std::vector<std::uint8_t> out;
  put_be(out, config.party_id, 4);
  const auto hash = config_hash(config);
  out.insert(out.end(), hash.begin(), hash.end());
  put_be(out, declared_size, 8);
  return out;
}

std::vector<std::uint32_t> peer_ids(const SessionConfig& config) {
  std::vector<std::uint32_t> ids;
  if (config.role == Role::kContributor) return {1, 2};
  ids.push_back(config.party_id == 1 ? 2 : 1);
  for (std::uint32_t id = 3; id <= config.m; ++id) ids.push_back(id);
  return ids;
}

SharePair make_shares(std::span<const Element> sorted_set, std::uint32_t sigma, Prg& prg) {
  const std::uint64_t mask = element_mask(sigma);
  SharePair out;
  for (Element v : sorted_set) {
    const std::uint64_t r = prg.next_u64() & mask;
    out.to_garbler.push_back(r);
    out.to_evaluator.push_back(r ^ v);
  }
  return out;
}

std::vector<std::uint8_t> encode_shares(std::uint32_t party_id, std::span<const Element> share,
                                        std::uint32_t sigma) {
  std::vector<std::uint8_t> out;
  put_be(out, party_id, 4);
  const auto packed = pack_bits(element_bits(share, sigma));
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

PsiResult run_party(const SessionConfig& config, const PartyInput& input, PeerLinks& links) {
  const auto start = std::chrono::steady_clock::now();
  auto close_all = [&] {
    for (auto& [id, ch] : links.channels) {
      if (ch) ch->close();
    }
  };

  std::vector<Element> sorted;
  try {
    validate_config(config);
    sorted = sorted_checked_set(input.set, config.n, config.sigma);
  } catch (...) {
    // Local rejection: nothing is transmitted, peers see a disconnect.
    close_all();
    throw;
  }

  PsiResult result;
  try {
    handshake(config, declared_of(input), links, result);
    switch (config.role) {
      case Role::kContributor:
        run_contributor(config, sorted, links, result);
        break;
      case Role::kGarbler:
        run_garbler(config, sorted, links, result);
        break;
      case Role::kEvaluator:
        run_evaluator(config, sorted, links, result);
        break;
    }
  } catch (const std::exception& e) {
    const std::string reason =
        "party " + std::to_string(config.party_id) + " aborted: " + e.what();
    for (auto& [id, ch] : links.channels) {
      if (ch) ch->send_abort(reason);
    }
    close_all();
    if (dynamic_cast<const PeerAbort*>(&e) != nullptr) throw;
    throw ProtocolError(reason);
  }
  for (auto& [id, ch] : links.channels) {
    if (ch) result.traffic[id] = ch->traffic();
  }
  close_all();
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

PeerLinks connect_tcp(const SessionConfig& config, TcpListener& listener,
                      std::uint64_t declared_size, std::chrono::milliseconds timeout) {
  PeerLinks links;
  const auto hello = encode_hello(config, declared_size);
  std::set<std::uint32_t> to_accept;
  for (std::uint32_t id : peer_ids(config)) {
    if (id > config.party_id) {
      to_accept.insert(id);
      continue;
    }
    const Endpoint& e = config.roster.at(id);
    auto ch = std::make_unique<FrameChannel>(tcp_connect(e.host, e.port, timeout));
    ch->send(FrameType::kHello, hello);
    links.hello_sent.insert(id);
    links.channels[id] = std::move(ch);
  }
  while (!to_accept.empty()) {
    auto ch = std::make_unique<FrameChannel>(listener.accept(timeout));
    Frame f = ch->receive();
    if (f.type != FrameType::kHello || f.payload.size() != kHelloBytes) {
      throw ProtocolError("expected HELLO on an accepted connection");
    }
    std::size_t pos = 0;
    const auto id = static_cast<std::uint32_t>(get_be(f.payload, pos, 4));
    if (!to_accept.erase(id)) {
      throw ProtocolError("unexpected connection from party " + std::to_string(id));
    }
    links.pending_hello[id] = std::move(f);
    links.channels[id] = std::move(ch);
  }
  return links;
}

PsiResult run_party_tcp(const SessionConfig& config, const PartyInput& input,
                        std::chrono::milliseconds timeout) {
  validate_config(config);
  const Endpoint& self = config.roster.at(config.party_id);
  TcpListener listener(self.host, self.port);
  PeerLinks links = connect_tcp(config, listener, declared_of(input), timeout);
  listener.close();
  return run_party(config, input, links);
}

std::vector<PsiResult> simulate_session(const SimulationOptions& options,
                                        const std::vector<PartyInput>& inputs) {
  validate_params(options.params);
  const std::uint32_t m = options.params.parties;
  if (inputs.size() != m) throw std::invalid_argument("simulate_session: need one input per party");

  std::vector<std::unique_ptr<TcpListener>> listeners;
  std::vector<SessionConfig> configs(m);
  for (std::uint32_t id = 1; id <= m; ++id) {
    if (options.transport == Transport::kTcp) {
      listeners.push_back(std::make_unique<TcpListener>("127.0.0.1", 0));
    }
  }
  for (std::uint32_t id = 1; id <= m; ++id) {
    SessionConfig& c = configs[id - 1];
    c.m = m;
    c.n = options.params.set_size;
    c.sigma = options.params.sigma;
    c.mode = options.params.mode;
    c.compaction = options.params.compaction;
    c.party_id = id;
    c.role = role_for_party(id);
    c.ot_backend = options.ot_backend;
    for (std::uint32_t j = 1; j <= m; ++j) {
      c.roster[j] = options.transport == Transport::kTcp
                        ? Endpoint{"127.0.0.1", listeners[j - 1]->port()}
                        : Endpoint{"in-process", static_cast<std::uint16_t>(j)};
    }
  }

  std::vector<PeerLinks> links(m);
  if (options.transport == Transport::kInProcess) {
    for (std::uint32_t a = 1; a <= m; ++a) {
      for (std::uint32_t b : peer_ids(configs[a - 1])) {
        if (b < a) continue;
        auto [ca, cb] = make_in_process_pair();
        links[a - 1].channels[b] = std::make_unique<FrameChannel>(std::move(ca));
        links[b - 1].channels[a] = std::make_unique<FrameChannel>(std::move(cb));
      }
    }
  }

  std::vector<PsiResult> results(m);
  std::vector<std::exception_ptr> errors(m);
  {
    std::vector<std::jthread> threads;
    for (std::uint32_t k = 0; k < m; ++k) {
      threads.emplace_back([&, k] {
        try {
          if (options.transport == Transport::kTcp) {
            links[k] = connect_tcp(configs[k], *listeners[k], declared_of(inputs[k]),
                                   std::chrono::seconds(30));
            listeners[k]->close();
          }
          results[k] = run_party(configs[k], inputs[k], links[k]);
        } catch (...) {
          errors[k] = std::current_exception();
          for (auto& [id, ch] : links[k].channels) {
            if (ch) ch->close();
          }
        }
      });
    }
  }

  // Prefer the party that failed first-hand over those that saw its ABORT.
  std::exception_ptr root;
  int root_rank = -1;
  for (const auto& err : errors) {
    if (!err) continue;
    int rank = 0;
    try {
      std::rethrow_exception(err);
    } catch (const PeerAbort&) {
      rank = 0;
    } catch (const ProtocolError& e) {
      rank = std::string_view(e.what()).find("peer disconnected") != std::string_view::npos ? 1 : 2;
    } catch (...) {
      rank = 3;
    }
    if (rank > root_rank) {
      root = err;
      root_rank = rank;
    }
  }
  if (root) std::rethrow_exception(root);
  return results;
}

}  // namespace mpsi
