#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <boost/random/uniform_int_distribution.hpp>

#include "tim/galois.hpp"
#include "tim/topology.hpp"

namespace tim::test {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Random distribution with small integer weights on a random support. Sparse
// supports are common so that quadruple matching is exercised unevenly.
inline StateDistribution random_distribution(gf::Rng& rng, int max_weight = 12) {
  boost::random::uniform_int_distribution<int> support(1, static_cast<int>(kStateCount));
  boost::random::uniform_int_distribution<int> weight(0, max_weight);
  boost::random::uniform_int_distribution<std::size_t> pick(0, kStateCount - 1);
  std::map<StateId, int> w;
  const int n = support(rng);
  for (int k = 0; k < n; ++k) w[static_cast<StateId>(pick(rng))] += weight(rng);
  int total = 0;
  for (const auto& [s, x] : w) total += x;
  if (total == 0) return StateDistribution::point_mass(static_cast<StateId>(pick(rng)));
  std::map<StateId, Rational> m;
  for (const auto& [s, x] : w) m[s] = Rational(x, total);
  return StateDistribution(m);
}

}  // namespace tim::test
