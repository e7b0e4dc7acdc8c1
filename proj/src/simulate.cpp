#include "tim/simulate.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include <boost/random/uniform_int_distribution.hpp>
#include <json.hpp>

namespace tim {

namespace {

using enum StateId;

constexpr std::array<std::array<StateId, 4>, 2> kQuadruples = {{
    {B1, C1, D1, H1},
    {B2, C2, D2, H2},
}};

constexpr std::uint64_t kMaxUses = 100'000'000;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t idx(StateId s) { return static_cast<std::size_t>(s); }

BlockResult run_block(const BlockSkeleton& sk, gf::Field field, std::uint64_t seed, bool trace) {
  gf::Rng rng(seed);
  std::vector<gf::Element> msgs;
  msgs.reserve(sk.symbol_count());
  for (std::size_t k = 0; k < sk.symbol_count(); ++k) msgs.push_back(gf::rand_element(field, rng));

  const SchemeBlock block = instantiate(sk, msgs);
  const auto states = block.states();
  const ChannelDraw ch = draw_channel(states, field, rng);
  const DecodeResult dec = decode_block(block, transmit(block, ch), ch);

  for (User rx = 0; rx < kUsers; ++rx)
    for (std::size_t k = 0; k < dec.decoded[rx].size(); ++k)
      if (dec.decoded[rx][k] && *dec.decoded[rx][k] != block.messages[rx][k])
        throw std::logic_error("decoder returned a wrong symbol in a " +
                               std::string(to_string(sk.kind)) + " block");

  BlockResult r{sk, block.symbol_count(), dec.delivered(), dec.failures(), {}};
  if (trace) r.trace = format_trace(block, dec);
  return r;
}

}  // namespace

std::string_view to_string(Mode m) noexcept { return m == Mode::Joint ? "joint" : "separate"; }

std::optional<Mode> mode_from_string(std::string_view s) noexcept {
  if (s == "joint") return Mode::Joint;
  if (s == "separate") return Mode::Separate;
  return std::nullopt;
}

Occurrences count_occurrences(std::span<const StateId> sequence) {
  Occurrences occ{};
  for (auto s : sequence) ++occ[idx(s)];
  return occ;
}

std::vector<BlockSkeleton> schedule(const Occurrences& occ, Mode mode) {
  Occurrences left = occ;
  std::vector<BlockSkeleton> out;
  if (mode == Mode::Joint) {
    for (std::size_t v = 0; v < kQuadruples.size(); ++v) {
      const auto& quad = kQuadruples[v];
      std::uint64_t n = left[idx(quad[0])];
      for (auto s : quad) n = std::min(n, left[idx(s)]);
      for (auto s : quad) left[idx(s)] -= n;
      const BlockKind kind = v == 0 ? BlockKind::Quadruple1 : BlockKind::Quadruple2;
      for (std::uint64_t k = 0; k < n; ++k) out.push_back({kind, {quad.begin(), quad.end()}});
    }
  }
  for (const auto& e : all_states()) {
    const std::uint64_t n = left[idx(e.id)];
    if (e.id == H1 || e.id == H2) {
      for (std::uint64_t k = 0; k < n / 2; ++k) out.push_back({BlockKind::HRepetition, {e.id, e.id}});
      if (n % 2) out.push_back({BlockKind::HSingle, {e.id}});
      continue;
    }
    const BlockKind kind = e.id == A ? BlockKind::Full : BlockKind::Silencing;
    for (std::uint64_t k = 0; k < n; ++k) out.push_back({kind, {e.id}});
  }
  return out;
}

Rational separate_rate(StateId s) {
  if (s == A) return 3;
  if (s == H1 || s == H2) return Rational(3, 2);
  return 2;
}

Rational accounting(const StateDistribution& d, Mode mode) {
  std::array<Rational, kStateCount> left;
  for (const auto& e : all_states()) left[idx(e.id)] = d.mass(e.id);
  Rational total = 0;
  if (mode == Mode::Joint) {
    for (const auto& quad : kQuadruples) {
      Rational m = left[idx(quad[0])];
      for (auto s : quad) m = std::min(m, left[idx(s)]);
      // Each matched unit of mass spans 4 uses carrying 9 symbols.
      total += 9 * m;
      for (auto s : quad) left[idx(s)] -= m;
    }
  }
  for (const auto& e : all_states()) total += left[idx(e.id)] * separate_rate(e.id);
  return total;
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x5bd1e995ULL));
}

Occurrences generate_occurrences(const SimulationConfig& cfg) {
  if (cfg.rounds.has_value() == cfg.n_uses.has_value())
    throw ConfigInvalid("set exactly one of rounds and n_uses");
  const BigInt den = cfg.distribution.common_denominator();
  Occurrences occ{};

  if (cfg.rounds) {
    if (*cfg.rounds == 0) throw ConfigInvalid("rounds must be positive");
    if (den * *cfg.rounds > kMaxUses)
      throw ConfigInvalid("rounds x common denominator exceeds " + std::to_string(kMaxUses) + " uses");
    for (const auto& e : all_states()) {
      const Rational c = cfg.distribution.mass(e.id) * den * *cfg.rounds;
      occ[idx(e.id)] = boost::multiprecision::numerator(c).convert_to<std::uint64_t>();
    }
    return occ;
  }

  if (*cfg.n_uses == 0) throw ConfigInvalid("n_uses must be positive");
  if (*cfg.n_uses > kMaxUses) throw ConfigInvalid("n_uses exceeds " + std::to_string(kMaxUses));
  if (den > std::numeric_limits<std::uint64_t>::max())
    throw ConfigInvalid("distribution denominator too large for sampling");
  const auto n = den.convert_to<std::uint64_t>();
  // Cumulative integer weights; a state with weight w owns w of the n slots.
  std::array<std::uint64_t, kStateCount> upper{};
  std::uint64_t acc = 0;
  for (const auto& e : all_states()) {
    const Rational w = cfg.distribution.mass(e.id) * den;
    acc += boost::multiprecision::numerator(w).convert_to<std::uint64_t>();
    upper[idx(e.id)] = acc;
  }
  gf::Rng rng(block_seed(cfg.seed, std::numeric_limits<std::uint64_t>::max()));
  boost::random::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  for (std::uint64_t k = 0; k < *cfg.n_uses; ++k) {
    const std::uint64_t slot = pick(rng);
    const auto it = std::upper_bound(upper.begin(), upper.end(), slot);
    ++occ[static_cast<std::size_t>(it - upper.begin())];
  }
  return occ;
}

SimulationReport run_occurrences(const SimulationConfig& cfg, const Occurrences& occ) {
  std::optional<gf::Field> field;
  try {
    field.emplace(cfg.q);
  } catch (const gf::NotPrime& e) {
    throw ConfigInvalid(e.what());
  }
  if (cfg.threads == 0) throw ConfigInvalid("threads must be positive");

  const auto plan = schedule(occ, cfg.mode);
  std::vector<BlockResult> results(plan.size());

  const unsigned workers = std::min<std::size_t>(cfg.threads, std::max<std::size_t>(plan.size(), 1));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t b = w; b < plan.size(); b += workers)
        results[b] = run_block(plan[b], *field, block_seed(cfg.seed, b), cfg.collect_trace);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SimulationReport r;
  r.mode = cfg.mode;
  r.q = cfg.q;
  r.seed = cfg.seed;
  r.heuristic = cfg.mode == Mode::Joint && !cfg.distribution.is_uniform();
  for (const auto& br : results) {
    auto& tally = r.per_kind[br.skeleton.kind];
    ++tally.blocks;
    tally.uses += br.skeleton.states.size();
    tally.symbols_sent += br.symbols_sent;
    tally.symbols_delivered += br.symbols_delivered;
    tally.failures += br.failures;
    for (auto s : br.skeleton.states) ++r.per_state_uses[idx(s)];
    r.uses += br.skeleton.states.size();
    r.symbols_delivered += br.symbols_delivered;
    r.failures += br.failures;
    if (br.failures) ++r.failed_blocks;
  }
  r.exact_dof = accounting(cfg.distribution, cfg.mode);
  r.empirical_dof = r.uses ? Rational(r.symbols_delivered, r.uses) : Rational(0);
  r.blocks = std::move(results);
  return r;
}

SimulationReport run(const SimulationConfig& cfg) {
  return run_occurrences(cfg, generate_occurrences(cfg));
}

// ---------------------------------------------------------------------------

std::string report_to_json(const SimulationReport& r, bool with_float) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(r.mode);
  j["q"] = r.q;
  j["seed"] = r.seed;
  j["uses"] = r.uses;
  j["symbols_delivered"] = r.symbols_delivered;
  j["failures"] = r.failures;
  j["failed_blocks"] = r.failed_blocks;
  j["exact_dof"] = to_string(r.exact_dof);
  j["empirical_dof"] = to_string(r.empirical_dof);
  if (with_float) {
    j["exact_dof_float"] = to_double(r.exact_dof);
    j["empirical_dof_float"] = to_double(r.empirical_dof);
  }
  j["scheme"] = r.heuristic ? "heuristic achievable" : "achievable";
  auto per_state = nlohmann::ordered_json::object();
  for (const auto& e : all_states())
    if (r.per_state_uses[idx(e.id)]) per_state[std::string(name(e.id))] = r.per_state_uses[idx(e.id)];
  j["per_state"] = per_state;
  auto per_kind = nlohmann::ordered_json::object();
  for (const auto& [kind, t] : r.per_kind)
    per_kind[std::string(to_string(kind))] = {{"blocks", t.blocks},
                                              {"uses", t.uses},
                                              {"symbols_sent", t.symbols_sent},
                                              {"symbols_delivered", t.symbols_delivered},
                                              {"failures", t.failures}};
  j["per_kind"] = per_kind;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const SimulationReport& r) {
  std::ostringstream os;
  os << "block,kind,states,uses,symbols_sent,symbols_delivered,failures\n";
  for (std::size_t b = 0; b < r.blocks.size(); ++b) {
    const auto& br = r.blocks[b];
    os << b << ',' << to_string(br.skeleton.kind) << ',';
    for (std::size_t k = 0; k < br.skeleton.states.size(); ++k)
      os << (k ? ";" : "") << name(br.skeleton.states[k]);
    os << ',' << br.skeleton.states.size() << ',' << br.symbols_sent << ',' << br.symbols_delivered
       << ',' << br.failures << '\n';
  }
  return os.str();
}

std::string report_to_text(const SimulationReport& r) {
  std::ostringstream os;
  os << "mode            " << to_string(r.mode) << (r.heuristic ? " (heuristic achievable)" : "") << "\n"
     << "field           GF(" << r.q << ")\n"
     << "seed            " << r.seed << "\n"
     << "channel uses    " << r.uses << "\n"
     << "delivered       " << r.symbols_delivered << "\n"
     << "failures        " << r.failures << " symbols in " << r.failed_blocks << " blocks\n"
     << "exact DoF       " << to_string(r.exact_dof) << "\n"
     << "empirical DoF   " << to_string(r.empirical_dof) << "\n";
  for (const auto& [kind, t] : r.per_kind)
    os << "  " << to_string(kind) << ": " << t.blocks << " blocks, " << t.uses << " uses, "
       << t.symbols_delivered << "/" << t.symbols_sent << " symbols\n";
  return os.str();
}

std::string report_trace(const SimulationReport& r) {
  std::ostringstream os;
  for (std::size_t b = 0; b < r.blocks.size(); ++b) {
    os << "# block " << b << " " << to_string(r.blocks[b].skeleton.kind) << "\n" << r.blocks[b].trace;
  }
  return os.str();
}

}  // namespace tim
