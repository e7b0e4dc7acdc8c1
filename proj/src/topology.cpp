#include "tim/topology.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace tim {

namespace {

constexpr std::array<std::string_view, kStateCount> kNames = {
    "A",
    "B1", "C1", "D1", "E1", "F1", "G1", "H1", "I1", "J1", "K1",
    "B2", "C2", "D2", "E2", "F2", "G2", "H2", "I2", "J2", "K2",
    "B3", "C3", "D3", "E3", "F3", "G3",
};

// Interfering Tx (1-based, 0 = none) at Rx1, Rx2, Rx3.
constexpr std::array<std::array<int, kUsers>, kStateCount> kLinks = {{
    {0, 0, 0},  // A
    {2, 0, 0}, {0, 3, 0}, {0, 0, 1}, {2, 3, 0}, {0, 3, 1},  // B1 C1 D1 E1 F1
    {2, 0, 1}, {2, 3, 1}, {2, 1, 1}, {2, 3, 2}, {3, 3, 1},  // G1 H1 I1 J1 K1
    {0, 1, 0}, {0, 0, 2}, {3, 0, 0}, {0, 1, 2}, {3, 0, 2},  // B2 C2 D2 E2 F2
    {3, 1, 0}, {3, 1, 2}, {2, 1, 2}, {3, 3, 2}, {3, 1, 1},  // G2 H2 I2 J2 K2
    {2, 1, 0}, {0, 3, 2}, {3, 0, 1}, {0, 1, 1}, {2, 0, 2},  // B3 C3 D3 E3 F3
    {3, 3, 0},                                              // G3
}};

std::array<CatalogEntry, kStateCount> build_catalog() {
  std::array<CatalogEntry, kStateCount> out{};
  for (std::size_t s = 0; s < kStateCount; ++s) {
    out[s].id = static_cast<StateId>(s);
    for (User rx = 0; rx < kUsers; ++rx)
      if (kLinks[s][rx] != 0) out[s].pattern.interferer[rx] = static_cast<User>(kLinks[s][rx] - 1);
  }
  return out;
}

const std::array<CatalogEntry, kStateCount>& catalog() {
  static const auto c = build_catalog();
  return c;
}

using enum StateId;

// Receiver that Tx i reaches through the delta / gamma links.
constexpr std::array<User, kUsers> kSigma = {2, 0, 1};
constexpr std::array<User, kUsers> kTau = {1, 2, 0};

}  // namespace

UnknownState::UnknownState(std::string_view n)
    : std::invalid_argument("unknown state: \"" + std::string(n) + "\"") {}

unsigned TopologyState::interference_count() const noexcept {
  return static_cast<unsigned>(std::count_if(interferer.begin(), interferer.end(),
                                             [](const auto& i) { return i.has_value(); }));
}

std::span<const CatalogEntry> all_states() noexcept { return catalog(); }

std::string_view name(StateId s) noexcept { return kNames[static_cast<std::size_t>(s)]; }

std::optional<StateId> state_from_name(std::string_view n) noexcept {
  auto it = std::find(kNames.begin(), kNames.end(), n);
  if (it == kNames.end()) return std::nullopt;
  return static_cast<StateId>(it - kNames.begin());
}

StateId parse_state(std::string_view n) {
  if (auto s = state_from_name(n)) return *s;
  throw UnknownState(n);
}

const TopologyState& lookup(StateId s) noexcept {
  return catalog()[static_cast<std::size_t>(s)].pattern;
}

StateId from_pattern(const TopologyState& p) {
  for (User rx = 0; rx < kUsers; ++rx)
    if (p.interferer[rx] && (*p.interferer[rx] >= kUsers || *p.interferer[rx] == rx))
      throw std::invalid_argument("malformed topology pattern");
  for (const auto& e : catalog())
    if (e.pattern == p) return e.id;
  throw std::logic_error("catalog is not total over well-formed patterns");
}

std::vector<User> silent_candidates(StateId s) {
  const auto& p = lookup(s);
  std::vector<User> out;
  for (User t = 0; t < kUsers; ++t) {
    bool clean = true;
    for (User rx = 0; rx < kUsers; ++rx)
      if (rx != t && p.interferer[rx] && *p.interferer[rx] != t) clean = false;
    if (clean) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------

StateSet make_set(std::initializer_list<StateId> ids) {
  StateSet s;
  for (auto id : ids) s.set(static_cast<std::size_t>(id));
  return s;
}

std::vector<StateId> members(const StateSet& s) {
  std::vector<StateId> out;
  for (std::size_t i = 0; i < kStateCount; ++i)
    if (s.test(i)) out.push_back(static_cast<StateId>(i));
  return out;
}

StateSet all_state_set() { return StateSet{}.set(); }

ConverseSets listed_converse_sets(User i) {
  switch (i) {
    case 0: {
      const auto d = make_set({D1, F1, G1, H1, I1, K1, K2, D3});
      const auto g = make_set({B2, E2, G2, H2, I2, B3});
      return {E3, d, g, ~(make_set({E3}) | d | g)};
    }
    case 1: {
      const auto d = make_set({B1, E1, G1, H1, I1, J1, I2, B3});
      const auto g = make_set({C2, E2, F2, H2, J2, C3});
      return {F3, d, g, ~(make_set({F3}) | d | g)};
    }
    case 2: {
      const auto d = make_set({C1, E1, F1, H1, J1, K1, J2, C3});
      const auto g = make_set({D2, F2, G2, H2, K2, D3});
      return {G3, d, g, ~(make_set({G3}) | d | g)};
    }
  }
  throw std::out_of_range("user index must be 0, 1 or 2");
}

ConverseSets derived_converse_sets(User i) {
  if (i >= kUsers) throw std::out_of_range("user index must be 0, 1 or 2");
  ConverseSets out{};
  bool found_both = false;
  for (const auto& e : catalog()) {
    const bool to_sigma = e.pattern.interferer[kSigma[i]] == i;
    const bool to_tau = e.pattern.interferer[kTau[i]] == i;
    // Tx i is the only interferer and reaches both other receivers.
    if (to_sigma && to_tau && e.pattern.interference_count() == 2) {
      if (found_both) throw std::logic_error("more than one state with Tx i interfering both");
      out.both = e.id;
      found_both = true;
    }
  }
  if (!found_both) throw std::logic_error("no state with Tx i interfering both receivers");
  for (const auto& e : catalog()) {
    if (e.id == out.both) continue;
    const std::size_t bit = static_cast<std::size_t>(e.id);
    if (e.pattern.interferer[kSigma[i]] == i)
      out.delta.set(bit);
    else if (e.pattern.interferer[kTau[i]] == i)
      out.gamma.set(bit);
    else
      out.theta.set(bit);
  }
  return out;
}

StateId both_state(User i) { return listed_converse_sets(i).both; }
StateSet delta(User i) { return listed_converse_sets(i).delta; }
StateSet gamma(User i) { return listed_converse_sets(i).gamma; }
StateSet theta(User i) { return listed_converse_sets(i).theta; }

// ---------------------------------------------------------------------------

StateDistribution::StateDistribution(const std::map<StateId, Rational>& masses) {
  Rational total = 0;
  for (const auto& [id, m] : masses) {
    if (m < 0) throw BadDistribution("negative mass for state " + std::string(name(id)));
    mass_[static_cast<std::size_t>(id)] = m;
    total += m;
  }
  if (total != 1) throw BadDistribution("masses sum to " + to_string(total) + ", expected 1");
}

StateDistribution StateDistribution::uniform() {
  StateDistribution d;
  d.mass_.fill(Rational(1, static_cast<int>(kStateCount)));
  return d;
}

StateDistribution StateDistribution::point_mass(StateId s) {
  StateDistribution d;
  d.mass_[static_cast<std::size_t>(s)] = 1;
  return d;
}

Rational StateDistribution::mass(const StateSet& set) const {
  Rational total = 0;
  for (std::size_t i = 0; i < kStateCount; ++i)
    if (set.test(i)) total += mass_[i];
  return total;
}

bool StateDistribution::is_uniform() const { return *this == uniform(); }

BigInt StateDistribution::common_denominator() const {
  BigInt l = 1;
  for (const auto& m : mass_) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(m));
  return l;
}

StateDistribution distribution_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw BadDistribution(std::string("distribution is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("states") || !j.at("states").is_object())
    throw BadDistribution("distribution must be an object with a \"states\" object");
  std::map<StateId, Rational> masses;
  for (const auto& [key, value] : j.at("states").items()) {
    const auto id = state_from_name(key);
    if (!id) throw BadDistribution("unknown state in distribution: \"" + key + "\"");
    try {
      if (value.is_string())
        masses[*id] = parse_rational(value.get<std::string>());
      else if (value.is_number_integer())
        masses[*id] = Rational(value.get<std::int64_t>());
      else
        throw BadDistribution("mass for " + key + " must be a \"p/q\" string");
    } catch (const BadRational& e) {
      throw BadDistribution(e.what());
    }
  }
  return StateDistribution(masses);
}

std::string distribution_to_json(const StateDistribution& d) {
  nlohmann::ordered_json states = nlohmann::ordered_json::object();
  for (const auto& e : catalog())
    if (d.mass(e.id) != 0) states[std::string(name(e.id))] = to_string(d.mass(e.id));
  nlohmann::ordered_json j;
  j["states"] = states;
  return j.dump(2) + "\n";
}

std::string to_dot(StateId s) {
  const auto& p = lookup(s);
  std::ostringstream os;
  os << "digraph " << name(s) << " {\n"
     << "  rankdir=LR;\n";
  for (User u = 0; u < kUsers; ++u) os << "  tx" << u + 1 << " -> rx" << u + 1 << ";\n";
  for (User rx = 0; rx < kUsers; ++rx)
    if (p.interferer[rx])
      os << "  tx" << *p.interferer[rx] + 1 << " -> rx" << rx + 1
         << " [style=dashed, color=red, label=\"interference\"];\n";
  os << "}\n";
  return os.str();
}

std::string describe_links(StateId s) {
  const auto& p = lookup(s);
  std::string out;
  for (User rx = 0; rx < kUsers; ++rx) {
    if (!p.interferer[rx]) continue;
    if (!out.empty()) out += ", ";
    out += "Rx" + std::to_string(rx + 1) + "<-Tx" + std::to_string(*p.interferer[rx] + 1);
  }
  return out.empty() ? "none" : out;
}

}  // namespace tim
