#pragma once

#include <string>

#include "tim/rational.hpp"
#include "tim/topology.hpp"

namespace tim {

// Genie-aided converse. Doubling the Fano sum rate and handing each receiver
// the other two messages turns every receiver into a clean observer of its
// own transmitter; splitting each transmitted sequence over the state sets
// both(i), delta(i), gamma(i), theta(i) lets the negative entropy terms cancel
// the delta/gamma parts. What survives is one symbol per use for X_i over
// theta(i) and one per use for Y_i outside both(i):
//
//   2 R <= sum_i lambda(theta(i)) + sum_i (1 - lambda(both(i)))
//
// in units of log|GF|. Only this closed form is evaluated here.

/// min(3, (sum_i lambda(theta_i) + 3 - sum_i lambda(both_i)) / 2)
Rational upper_bound(const StateDistribution& d);

struct BoundReport {
  StateDistribution distribution;
  Rational upper;
  Rational achievable_joint;
  Rational achievable_separate;
  /// Joint scheme meets the bound. Only a comparison; for non-uniform
  /// distributions it does not claim converse optimality.
  bool tight = false;
};

BoundReport gap_report(const StateDistribution& d);

/// {"distribution": {...}, "upper": "p/q", "achievable_joint": ...,
///  "achievable_separate": ..., "tight": bool}
std::string bound_report_to_json(const BoundReport& r, bool with_float = false);
std::string bound_report_to_text(const BoundReport& r);

/// Upper bound with its lambda terms: {"upper", "lambda_theta": [..], "lambda_both": [..]}.
std::string upper_bound_to_json(const StateDistribution& d, bool with_float = false);

}  // namespace tim
