#include "etalab/operator_model.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "etalab/error.hpp"

namespace etalab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double ModelOperator::v_at(double x) const {
  double s = 0.0;
  for (const PotTerm& t : v)
    s += t.amp * (t.sine ? std::sin(kTwoPi * t.freq * x) : std::cos(kTwoPi * t.freq * x));
  return s;
}

double ModelOperator::v_bar() const {
  std::map<int, std::pair<double, double>> by_freq;  // freq -> (cos amp, sin amp)
  for (const PotTerm& t : v) {
    auto& [a, b] = by_freq[t.freq];
    (t.sine ? b : a) += t.amp;
  }
  double s = 0.0;
  for (const auto& [f, ab] : by_freq) s += std::hypot(ab.first, ab.second);
  return s;
}

int ModelOperator::v_max_freq() const {
  int f = 0;
  for (const PotTerm& t : v) f = std::max(f, t.freq);
  return f;
}

double ModelOperator::symbol_bound() const { return m + v_bar() + std::fabs(c); }

double ModelOperator::certified_line_gap() const {
  if (components == 1)
    fail_precondition("line cover gapless for this family (1-component operator)");
  return m - v_bar() - std::fabs(c);
}

std::string ModelOperator::str() const {
  std::ostringstream os;
  os << "comp=" << components;
  if (components == 2) os << ",m=" << m;
  os << ",c=" << c << ",theta=" << theta;
  if (!v.empty()) {
    os << ",v=";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) os << ",";
      os << v[i].amp << (v[i].sine ? "sin" : "cos") << v[i].freq;
    }
  }
  return os.str();
}

void ModelOperator::validate() const {
  if (components != 1 && components != 2)
    fail_parse("operator: comp must be 1 or 2, got " + std::to_string(components));
  if (!(theta >= 0.0 && theta < 1.0)) fail_parse("operator: theta must lie in [0,1)");
  if (!std::isfinite(m) || !std::isfinite(c)) fail_parse("operator: m and c must be finite");
  if (components == 2 && m < 0.0) fail_parse("operator: m must be >= 0");
  if (components == 1 && (m != 0.0 || !v.empty()))
    fail_parse("operator: mass and potential are 2-component-only fields");
  for (const PotTerm& t : v) {
    if (t.freq < 1) fail_parse("operator: potential frequencies must be >= 1");
    if (!std::isfinite(t.amp)) fail_parse("operator: potential amplitude must be finite");
  }
}

}  // namespace etalab
