#include "etalab/group.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <numeric>

#include "etalab/error.hpp"

namespace etalab {

std::string elem_key(const Elem& e) {
  std::string k(e.c.size() * sizeof(long long) + sizeof(int), '\0');
  std::memcpy(k.data(), e.c.data(), e.c.size() * sizeof(long long));
  std::memcpy(k.data() + e.c.size() * sizeof(long long), &e.tag, sizeof(int));
  return k;
}

Elem elem_from_key(const std::string& key, size_t /*coord_count_hint*/) {
  // Coordinate count is recovered from the key length (the free group has
  // variable-length canonical forms, so the hint is advisory only).
  if (key.size() < sizeof(int) || (key.size() - sizeof(int)) % sizeof(long long) != 0)
    fail_numeric("elem_from_key: malformed key");
  size_t n = (key.size() - sizeof(int)) / sizeof(long long);
  Elem e;
  e.c.resize(n);
  std::memcpy(e.c.data(), key.data(), n * sizeof(long long));
  std::memcpy(&e.tag, key.data() + n * sizeof(long long), sizeof(int));
  return e;
}

Elem Group::mul_gen(const Elem& a, int i, bool inverse) const {
  Elem g = generator(i);
  return mul(a, inverse ? inv(g) : g);
}

Elem Group::pow(const Elem& a, long long e) const {
  Elem base = e < 0 ? inv(a) : a;
  unsigned long long n = e < 0 ? -(unsigned long long)e : (unsigned long long)e;
  Elem acc = identity();
  while (n > 0) {
    if (n & 1) acc = mul(acc, base);
    base = mul(base, base);
    n >>= 1;
  }
  return acc;
}

namespace {

bool parse_ll(const std::string& s, long long& out) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (size_t j = i; j < s.size(); ++j)
    if (!std::isdigit((unsigned char)s[j])) return false;
  try {
    out = std::stoll(s);
  } catch (...) {
    return false;
  }
  return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace((unsigned char)ch)) {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

Elem Group::parse_word(const std::string& word) const {
  if (word.empty()) fail_parse("empty element spec");
  // Coordinate form (comma-separated integers, one exponent per generator):
  // only for groups where coordinates are generator exponents.
  const std::string nm = name();
  if (nm[0] == 'z' || nm.rfind("cyclic", 0) == 0) {
    std::vector<std::string> parts = split(word, ',');
    bool all_int = true;
    std::vector<long long> coords;
    for (const auto& p : parts) {
      long long v;
      if (!parse_ll(p, v)) {
        all_int = false;
        break;
      }
      coords.push_back(v);
    }
    if (all_int) {
      if ((int)coords.size() != gen_count())
        fail_parse("coordinate element spec '" + word + "' has wrong dimension for " + nm);
      Elem acc = identity();
      for (size_t i = 0; i < coords.size(); ++i)
        acc = mul(acc, pow(generator((int)i), coords[i]));
      return acc;
    }
  }
  if (word == "e" || word == "1") return identity();
  Elem acc = identity();
  for (const std::string& factor : split(word, '*')) {
    if (factor.empty()) fail_parse("empty factor in word '" + word + "'");
    std::string label = factor;
    long long expo = 1;
    size_t caret = factor.find('^');
    if (caret != std::string::npos) {
      label = factor.substr(0, caret);
      if (!parse_ll(factor.substr(caret + 1), expo))
        fail_parse("bad exponent in factor '" + factor + "'");
    }
    if (label == "e" || label == "1") continue;
    int gi = -1;
    for (int i = 0; i < gen_count(); ++i)
      if (gen_label(i) == label) {
        gi = i;
        break;
      }
    if (gi < 0) fail_parse("unknown generator '" + label + "' for group " + name());
    acc = mul(acc, pow(generator(gi), expo));
  }
  return acc;
}

namespace {

class ZdGroup final : public Group {
 public:
  explicit ZdGroup(int d) : d_(d) {}
  std::string name() const override { return d_ == 1 ? "z" : "z" + std::to_string(d_); }
  size_t coord_count() const override { return (size_t)d_; }
  int gen_count() const override { return d_; }
  std::string gen_label(int i) const override {
    static const char* lab[4] = {"a", "b", "c", "d"};
    return lab[i];
  }
  Elem identity() const override { return Elem{std::vector<long long>(d_, 0), 0}; }
  Elem generator(int i) const override {
    Elem e = identity();
    e.c[i] = 1;
    return e;
  }
  Elem mul(const Elem& a, const Elem& b) const override {
    Elem r = a;
    for (int i = 0; i < d_; ++i) r.c[i] += b.c[i];
    return r;
  }
  Elem inv(const Elem& a) const override {
    Elem r = a;
    for (int i = 0; i < d_; ++i) r.c[i] = -r.c[i];
    return r;
  }
  std::string format(const Elem& e) const override {
    std::string s = "(";
    for (int i = 0; i < d_; ++i) s += (i ? "," : "") + std::to_string(e.c[i]);
    return s + ")";
  }

 private:
  int d_;
};

class CyclicGroup final : public Group {
 public:
  explicit CyclicGroup(long long k) : k_(k) {
    if (k < 1) fail_parse("cyclic group order must be >= 1");
  }
  std::string name() const override { return "cyclic" + std::to_string(k_); }
  size_t coord_count() const override { return 1; }
  int gen_count() const override { return 1; }
  std::string gen_label(int) const override { return "g"; }
  Elem identity() const override { return Elem{{0}, 0}; }
  Elem generator(int) const override { return Elem{{k_ == 1 ? 0 : 1}, 0}; }
  Elem mul(const Elem& a, const Elem& b) const override {
    return Elem{{((a.c[0] + b.c[0]) % k_ + k_) % k_}, 0};
  }
  Elem inv(const Elem& a) const override { return Elem{{(k_ - a.c[0]) % k_}, 0}; }
  std::string format(const Elem& e) const override { return std::to_string(e.c[0]); }
  long long order() const { return k_; }

 private:
  long long k_;
};

// Free group on a, b.  Coordinates: reduced word, letters +1/-1 (a, a^-1) and
// +2/-2 (b, b^-1).
class Free2Group final : public Group {
 public:
  std::string name() const override { return "free2"; }
  size_t coord_count() const override { return 0; }  // variable length; see key note below
  int gen_count() const override { return 2; }
  std::string gen_label(int i) const override { return i == 0 ? "a" : "b"; }
  Elem identity() const override { return Elem{{}, 0}; }
  Elem generator(int i) const override { return Elem{{i + 1}, 0}; }
  Elem mul(const Elem& a, const Elem& b) const override {
    Elem r = a;
    for (long long letter : b.c) {
      if (!r.c.empty() && r.c.back() == -letter)
        r.c.pop_back();
      else
        r.c.push_back(letter);
    }
    return r;
  }
  Elem inv(const Elem& a) const override {
    Elem r;
    r.c.reserve(a.c.size());
    for (auto it = a.c.rbegin(); it != a.c.rend(); ++it) r.c.push_back(-*it);
    return r;
  }
  std::string format(const Elem& e) const override {
    if (e.c.empty()) return "e";
    std::string s;
    for (long long l : e.c) {
      if (!s.empty()) s += "*";
      s += (std::abs(l) == 1 ? "a" : "b");
      if (l < 0) s += "^-1";
    }
    return s;
  }
};

// Integer Heisenberg group: (x, y, z) ~ upper unitriangular [[1,x,z],[0,1,y],[0,0,1]].
class Heis3Group final : public Group {
 public:
  std::string name() const override { return "heis3"; }
  size_t coord_count() const override { return 3; }
  int gen_count() const override { return 2; }
  std::string gen_label(int i) const override { return i == 0 ? "x" : "y"; }
  Elem identity() const override { return Elem{{0, 0, 0}, 0}; }
  Elem generator(int i) const override {
    return i == 0 ? Elem{{1, 0, 0}, 0} : Elem{{0, 1, 0}, 0};
  }
  Elem mul(const Elem& a, const Elem& b) const override {
    return Elem{{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2] + a.c[0] * b.c[1]}, 0};
  }
  Elem inv(const Elem& a) const override {
    return Elem{{-a.c[0], -a.c[1], -a.c[2] + a.c[0] * a.c[1]}, 0};
  }
  std::string format(const Elem& e) const override {
    return "(" + std::to_string(e.c[0]) + "," + std::to_string(e.c[1]) + "," +
           std::to_string(e.c[2]) + ")";
  }
};

// SL2(Z) = <x, y | x^4 = 1, x^2 = y^3> with x = [[0,-1],[1,0]], y = [[0,-1],[1,1]].
// Canonical form = the integer matrix (row-major).  tag = value of the Z/12
// character fixed by x -> 3, y -> 2, maintained homomorphically.
class SL2ZGroup final : public Group {
 public:
  std::string name() const override { return "sl2z"; }
  size_t coord_count() const override { return 4; }
  int gen_count() const override { return 2; }
  std::string gen_label(int i) const override { return i == 0 ? "x" : "y"; }
  Elem identity() const override { return Elem{{1, 0, 0, 1}, 0}; }
  Elem generator(int i) const override {
    return i == 0 ? Elem{{0, -1, 1, 0}, 3} : Elem{{0, -1, 1, 1}, 2};
  }
  Elem mul(const Elem& a, const Elem& b) const override {
    auto m = [](long long u, long long v) {
      __int128 p = (__int128)u * v;
      return p;
    };
    __int128 r[4] = {m(a.c[0], b.c[0]) + m(a.c[1], b.c[2]), m(a.c[0], b.c[1]) + m(a.c[1], b.c[3]),
                     m(a.c[2], b.c[0]) + m(a.c[3], b.c[2]), m(a.c[2], b.c[1]) + m(a.c[3], b.c[3])};
    Elem out;
    out.c.resize(4);
    for (int i = 0; i < 4; ++i) {
      if (r[i] > INT64_MAX || r[i] < INT64_MIN) fail_numeric("sl2z entry overflow");
      out.c[i] = (long long)r[i];
    }
    out.tag = (a.tag + b.tag) % 12;
    return out;
  }
  Elem inv(const Elem& a) const override {
    return Elem{{a.c[3], -a.c[1], -a.c[2], a.c[0]}, (12 - a.tag % 12) % 12};
  }
  std::string format(const Elem& e) const override {
    return "[[" + std::to_string(e.c[0]) + "," + std::to_string(e.c[1]) + "],[" +
           std::to_string(e.c[2]) + "," + std::to_string(e.c[3]) + "]]";
  }
};

enum Strategy { kAbelian, kFreeCyclicWord, kHeisOrbit, kSL2Character };

std::vector<long long> cyclic_reduce(std::vector<long long> w) {
  while (w.size() >= 2 && w.front() == -w.back()) {
    w.erase(w.begin());
    w.pop_back();
  }
  return w;
}

bool is_rotation(const std::vector<long long>& u, const std::vector<long long>& v) {
  if (u.size() != v.size()) return false;
  size_t n = u.size();
  if (n == 0) return true;
  for (size_t s = 0; s < n; ++s) {
    bool ok = true;
    for (size_t i = 0; i < n && ok; ++i) ok = u[(s + i) % n] == v[i];
    if (ok) return true;
  }
  return false;
}

long long gcd_ll(long long a, long long b) { return std::gcd(std::abs(a), std::abs(b)); }

bool sl2z_finite_order(const Elem& e) {
  // Finite order in SL2(Z) <=> elliptic (|trace| < 2) or +-identity.
  long long tr = e.c[0] + e.c[3];
  if (tr == 2) return e.c[1] == 0 && e.c[2] == 0 && e.c[0] == 1;
  if (tr == -2) return e.c[1] == 0 && e.c[2] == 0 && e.c[0] == -1;
  return tr >= -1 && tr <= 1;
}

}  // namespace

ConjClass::ConjClass(std::shared_ptr<const Group> g, Elem rep, std::string label)
    : group_(std::move(g)), rep_(std::move(rep)), label_(std::move(label)) {
  const std::string n = group_->name();
  if (n == "free2")
    strategy_ = kFreeCyclicWord;
  else if (n == "heis3")
    strategy_ = kHeisOrbit;
  else if (n == "sl2z")
    strategy_ = kSL2Character;
  else
    strategy_ = kAbelian;
  if (strategy_ == kSL2Character && !sl2z_finite_order(rep_))
    fail_precondition("sl2z class membership oracle covers finite-order classes only");
}

bool ConjClass::is_identity_class() const { return rep_ == group_->identity(); }

bool ConjClass::member(const Elem& e) const {
  switch (strategy_) {
    case kAbelian:
      return e == rep_;
    case kFreeCyclicWord:
      return is_rotation(cyclic_reduce(e.c), cyclic_reduce(rep_.c));
    case kHeisOrbit: {
      if (e.c[0] != rep_.c[0] || e.c[1] != rep_.c[1]) return false;
      // (u,v,w)(a,b,c)(u,v,w)^-1 = (a, b, c + u*b - v*a): the center offset
      // moves by exactly gcd(a,b)*Z.
      long long g = gcd_ll(rep_.c[0], rep_.c[1]);
      if (g == 0) return e.c[2] == rep_.c[2];
      return (e.c[2] - rep_.c[2]) % g == 0;
    }
    case kSL2Character:
      // Finite-order classes are exactly the fibers of the Z/12 character
      // over finite-order elements.
      return sl2z_finite_order(e) && e.tag % 12 == rep_.tag % 12;
  }
  return false;
}

ConjClass make_class(std::shared_ptr<const Group> g, const std::string& word_spec) {
  Elem rep = g->parse_word(word_spec);
  return ConjClass(std::move(g), std::move(rep), word_spec);
}

std::shared_ptr<const Group> make_group(const std::string& spec) {
  std::string s;
  for (char ch : spec)
    if (!std::isspace((unsigned char)ch)) s.push_back((char)std::tolower((unsigned char)ch));
  if (s == "z") return std::make_shared<ZdGroup>(1);
  if (s.rfind("z:", 0) == 0 || (s.size() == 2 && s[0] == 'z' && std::isdigit((unsigned char)s[1]))) {
    long long d;
    if (!parse_ll(s[1] == ':' ? s.substr(2) : s.substr(1), d) || d < 1 || d > 4)
      fail_parse("z rank must be 1..4 in spec '" + spec + "'");
    return std::make_shared<ZdGroup>((int)d);
  }
  if (s == "free2" || s == "f2") return std::make_shared<Free2Group>();
  if (s.rfind("cyclic:", 0) == 0 || (s[0] == 'c' && s.size() > 1 && std::isdigit((unsigned char)s[1]))) {
    long long k;
    if (!parse_ll(s[0] == 'c' && s[1] != 'y' ? s.substr(1) : s.substr(7), k) || k < 1)
      fail_parse("bad cyclic order in spec '" + spec + "'");
    return std::make_shared<CyclicGroup>(k);
  }
  if (s == "heis3") return std::make_shared<Heis3Group>();
  if (s == "sl2z") return std::make_shared<SL2ZGroup>();
  fail_parse("unknown group spec '" + spec + "'");
}

}  // namespace etalab
