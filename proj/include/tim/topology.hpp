#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tim/rational.hpp"

namespace tim {

/// Number of transmitter/receiver pairs. Tx i always reaches Rx i.
inline constexpr unsigned kUsers = 3;
inline constexpr std::size_t kStateCount = 27;

/// Transmitter or receiver index, 0-based (Tx1 is 0). Printed 1-based.
using User = unsigned;

/// Connectivity states of the Wyner-type 3-user channel, in catalog order.
enum class StateId : std::uint8_t {
  A,
  B1, C1, D1, E1, F1, G1, H1, I1, J1, K1,
  B2, C2, D2, E2, F2, G2, H2, I2, J2, K2,
  B3, C3, D3, E3, F3, G3,
};

/// Which transmitter (if any) interferes at each receiver. The desired link
/// is implicit; `interferer[j] != j` always holds for catalog patterns.
struct TopologyState {
  std::array<std::optional<User>, kUsers> interferer;

  /// True when Tx `tx` is heard at Rx `rx` (desired link or interference).
  bool hears(User rx, User tx) const noexcept {
    return rx == tx || interferer[rx] == tx;
  }
  unsigned interference_count() const noexcept;

  friend bool operator==(const TopologyState&, const TopologyState&) = default;
};

struct CatalogEntry {
  StateId id;
  TopologyState pattern;
};

struct UnknownState : std::invalid_argument {
  explicit UnknownState(std::string_view name);
};

struct BadDistribution : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The 27 catalog states, in StateId order.
std::span<const CatalogEntry> all_states() noexcept;

std::string_view name(StateId s) noexcept;
std::optional<StateId> state_from_name(std::string_view name) noexcept;
/// Like state_from_name but throws UnknownState.
StateId parse_state(std::string_view name);

const TopologyState& lookup(StateId s) noexcept;

/// Inverse of lookup. Throws std::invalid_argument for a malformed pattern
/// (interferer equal to its own receiver or out of range).
StateId from_pattern(const TopologyState& p);

/// Transmitters whose silence leaves both remaining receivers interference-free.
std::vector<User> silent_candidates(StateId s);

// ---------------------------------------------------------------------------
// State sets used by the genie-aided converse.

using StateSet = std::bitset<kStateCount>;

StateSet make_set(std::initializer_list<StateId> ids);
std::vector<StateId> members(const StateSet& s);
inline bool contains(const StateSet& s, StateId id) { return s.test(static_cast<std::size_t>(id)); }
StateSet all_state_set();

struct ConverseSets {
  StateId both;  ///< the state where Tx i interferes both other receivers
  StateSet delta;
  StateSet gamma;
  StateSet theta;
};

/// The hardcoded lists for user i.
ConverseSets listed_converse_sets(User i);
/// The same sets rebuilt from link rules over the catalog:
///   both(i):  the state whose only interference is Tx i at both other receivers
///   delta(i): states with Tx i -> Rx sigma(i), minus both(i); sigma = (1->3, 2->1, 3->2)
///   gamma(i): states with Tx i -> Rx tau(i), not in delta(i), minus both(i); tau = (1->2, 2->3, 3->1)
///   theta(i): states in which Tx i interferes nobody.
ConverseSets derived_converse_sets(User i);

StateId both_state(User i);
StateSet delta(User i);
StateSet gamma(User i);
StateSet theta(User i);

// ---------------------------------------------------------------------------

/// Exact probability mass over the catalog. Always nonnegative and sums to 1.
class StateDistribution {
 public:
  /// Throws BadDistribution on negative mass or sum != 1. Missing states are 0.
  explicit StateDistribution(const std::map<StateId, Rational>& masses);

  static StateDistribution uniform();
  static StateDistribution point_mass(StateId s);

  const Rational& mass(StateId s) const noexcept { return mass_[static_cast<std::size_t>(s)]; }
  Rational mass(const StateSet& set) const;
  bool is_uniform() const;

  /// Least common multiple of all mass denominators.
  BigInt common_denominator() const;

  friend bool operator==(const StateDistribution&, const StateDistribution&) = default;

 private:
  StateDistribution() = default;
  std::array<Rational, kStateCount> mass_{};
};

inline Rational mass(const StateDistribution& d, const StateSet& set) { return d.mass(set); }

/// {"states": {"A": "1/27", ...}}; omitted states default to 0. Throws BadDistribution.
StateDistribution distribution_from_json(std::string_view text);
/// Canonical form: catalog order, zero masses omitted, 2-space indent, trailing newline.
std::string distribution_to_json(const StateDistribution& d);

/// Graphviz digraph of one state: desired links solid, interference dashed and labeled.
std::string to_dot(StateId s);

/// e.g. "Rx1<-Tx2, Rx2<-Tx3, Rx3<-Tx1", or "none".
std::string describe_links(StateId s);

}  // namespace tim
