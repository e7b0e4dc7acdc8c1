#include "tim/bounds.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "tim/simulate.hpp"

namespace tim {

Rational upper_bound(const StateDistribution& d) {
  Rational twice = 0;
  for (User i = 0; i < kUsers; ++i) {
    const auto sets = listed_converse_sets(i);
    twice += d.mass(sets.theta) + 1 - d.mass(sets.both);
  }
  return std::min(Rational(3), Rational(twice / 2));
}

BoundReport gap_report(const StateDistribution& d) {
  BoundReport r{d, upper_bound(d), accounting(d, Mode::Joint), accounting(d, Mode::Separate), false};
  r.tight = r.upper == r.achievable_joint;
  return r;
}

namespace {

nlohmann::ordered_json distribution_json(const StateDistribution& d) {
  return nlohmann::ordered_json::parse(distribution_to_json(d))["states"];
}

}  // namespace

std::string bound_report_to_json(const BoundReport& r, bool with_float) {
  nlohmann::ordered_json j;
  j["distribution"] = distribution_json(r.distribution);
  j["upper"] = to_string(r.upper);
  j["achievable_joint"] = to_string(r.achievable_joint);
  j["achievable_separate"] = to_string(r.achievable_separate);
  j["tight"] = r.tight;
  if (with_float) {
    j["upper_float"] = to_double(r.upper);
    j["achievable_joint_float"] = to_double(r.achievable_joint);
    j["achievable_separate_float"] = to_double(r.achievable_separate);
  }
  return j.dump(2) + "\n";
}

std::string bound_report_to_text(const BoundReport& r) {
  std::ostringstream os;
  os << "upper bound            " << to_string(r.upper) << "\n"
     << "achievable (joint)     " << to_string(r.achievable_joint) << "\n"
     << "achievable (separate)  " << to_string(r.achievable_separate) << "\n"
     << "tight                  " << (r.tight ? "yes" : "no") << "\n";
  return os.str();
}

std::string upper_bound_to_json(const StateDistribution& d, bool with_float) {
  nlohmann::ordered_json j;
  const Rational u = upper_bound(d);
  j["upper"] = to_string(u);
  if (with_float) j["upper_float"] = to_double(u);
  j["lambda_theta"] = nlohmann::ordered_json::array();
  j["lambda_both"] = nlohmann::ordered_json::array();
  for (User i = 0; i < kUsers; ++i) {
    const auto sets = listed_converse_sets(i);
    j["lambda_theta"].push_back(to_string(d.mass(sets.theta)));
    j["lambda_both"].push_back(to_string(d.mass(sets.both)));
  }
  return j.dump(2) + "\n";
}

}  // namespace tim
