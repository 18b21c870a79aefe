#include "etalab/specparse.hpp"

#include <cstdlib>
#include <sstream>

#include "etalab/error.hpp"

namespace etalab {

namespace {

double parse_real(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double x = std::stod(s, &pos);
    if (pos != s.size()) fail_parse(what + ": trailing junk in '" + s + "'");
    return x;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail_parse(what + ": not a number: '" + s + "'");
  }
}

long parse_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    long x = std::stol(s, &pos);
    if (pos != s.size()) fail_parse(what + ": trailing junk in '" + s + "'");
    return x;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail_parse(what + ": not an integer: '" + s + "'");
  }
}

// "<amp>cos<freq>" or "<amp>sin<freq>"
PotTerm parse_pot_term(const std::string& tok) {
  size_t p = tok.find("cos");
  bool sine = false;
  if (p == std::string::npos) {
    p = tok.find("sin");
    sine = true;
  }
  if (p == std::string::npos)
    fail_parse("potential term '" + tok + "' must contain cos or sin");
  PotTerm t;
  t.sine = sine;
  std::string amp = tok.substr(0, p);
  t.amp = amp.empty() ? 1.0 : parse_real(amp, "potential amplitude");
  t.freq = (int)parse_int(tok.substr(p + 3), "potential frequency");
  return t;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

}  // namespace

ModelOperator parse_operator(const std::string& spec) {
  if (spec.empty()) fail_parse("empty operator spec");
  ModelOperator op;
  op.components = 0;  // force explicit comp=
  bool in_v = false;
  for (const std::string& raw : split(spec, ',')) {
    if (raw.empty()) fail_parse("operator spec has an empty field");
    size_t eq = raw.find('=');
    if (eq == std::string::npos) {
      if (!in_v) fail_parse("operator field '" + raw + "' is not key=value");
      for (const std::string& term : split(raw, '+')) op.v.push_back(parse_pot_term(term));
      continue;
    }
    std::string key = raw.substr(0, eq), val = raw.substr(eq + 1);
    in_v = false;
    if (key == "comp")
      op.components = (int)parse_int(val, "comp");
    else if (key == "m")
      op.m = parse_real(val, "m");
    else if (key == "c")
      op.c = parse_real(val, "c");
    else if (key == "theta")
      op.theta = parse_real(val, "theta");
    else if (key == "v") {
      in_v = true;
      for (const std::string& term : split(val, '+')) op.v.push_back(parse_pot_term(term));
    } else
      fail_parse("unknown operator field '" + key + "'");
  }
  if (op.components == 0) fail_parse("operator spec must set comp=1 or comp=2");
  op.validate();
  return op;
}

CoverSpec parse_cover(const std::string& spec) {
  CoverSpec cv;
  if (spec == "line") {
    cv.line = true;
    return cv;
  }
  if (spec.rfind("n=", 0) == 0) {
    cv.n = (int)parse_int(spec.substr(2), "cover n");
    if (cv.n < 1) fail_parse("cover n must be >= 1");
    return cv;
  }
  fail_parse("cover spec must be 'n=<k>' or 'line', got '" + spec + "'");
}

std::vector<int> parse_cover_list(const std::string& spec) {
  std::vector<int> out;
  size_t dots = spec.find("..");
  if (dots != std::string::npos) {
    long lo = parse_int(spec.substr(0, dots), "range start");
    long hi = parse_int(spec.substr(dots + 2), "range end");
    if (lo < 1 || hi < lo || hi - lo > 4096) fail_parse("bad cover range '" + spec + "'");
    for (long v = lo; v <= hi; ++v) out.push_back((int)v);
    return out;
  }
  for (const std::string& tok : split(spec, ',')) {
    long v = parse_int(tok, "cover list entry");
    if (v < 1) fail_parse("cover list entries must be >= 1");
    out.push_back((int)v);
  }
  if (out.empty()) fail_parse("empty cover list");
  return out;
}

}  // namespace etalab
