#include "etalab/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "etalab/cayley.hpp"
#include "etalab/error.hpp"
#include "etalab/quadrature.hpp"

namespace etalab {

namespace {

std::string qkey(const QElem& q) {
  std::string k(q.size() * sizeof(long long), '\0');
  std::memcpy(k.data(), q.data(), q.size() * sizeof(long long));
  return k;
}

long long parse_ll_or_fail(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    fail_parse("bad integer '" + s + "' in " + what);
  }
}

// "2,4,8" or "2..20" -> list of integers.
std::vector<long long> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<long long> out;
  size_t dots = s.find("..");
  if (dots != std::string::npos) {
    long long lo = parse_ll_or_fail(s.substr(0, dots), what);
    long long hi = parse_ll_or_fail(s.substr(dots + 2), what);
    if (lo > hi || hi - lo > 10000) fail_parse("bad range '" + s + "' in " + what);
    for (long long v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(parse_ll_or_fail(cur, what));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (out.empty()) fail_parse("empty list in " + what);
  return out;
}

}  // namespace

struct Quotient::Cache {
  std::mutex mu;
  bool elements_built = false;
  std::vector<QElem> elements;
  std::unordered_map<std::string, int> class_id;
  std::vector<std::vector<QElem>> classes;
};

Quotient::Cache& Quotient::cache() const {
  static std::mutex create_mu;
  std::lock_guard<std::mutex> lk(create_mu);
  if (!cache_) cache_ = std::make_shared<Cache>();
  return *cache_;
}

const std::vector<QElem>& Quotient::elements() const {
  Cache& c = cache();
  std::lock_guard<std::mutex> lk(c.mu);
  if (!c.elements_built) {
    std::unordered_set<std::string> seen;
    std::vector<QElem> gens;
    for (int i = 0; i < parent().gen_count(); ++i) {
      Elem g = parent().generator(i);
      gens.push_back(pi(g));
      gens.push_back(pi(parent().inv(g)));
    }
    std::vector<QElem> frontier{qid()};
    seen.insert(qkey(frontier.front()));
    c.elements.push_back(frontier.front());
    while (!frontier.empty()) {
      std::vector<QElem> next;
      for (const QElem& q : frontier) {
        for (const QElem& s : gens) {
          QElem r = qmul(q, s);
          if (seen.insert(qkey(r)).second) {
            if ((long long)seen.size() > budget_)
              fail_budget("quotient '" + label() + "' exceeds the enumeration budget of " +
                          std::to_string(budget_) + " elements");
            c.elements.push_back(r);
            next.push_back(std::move(r));
          }
        }
      }
      frontier = std::move(next);
    }
    c.elements_built = true;
  }
  return c.elements;
}

long long Quotient::order() const { return (long long)elements().size(); }

std::vector<QElem> Quotient::class_of(const QElem& a) const {
  Cache& c = cache();
  std::lock_guard<std::mutex> lk(c.mu);
  auto it = c.class_id.find(qkey(a));
  if (it == c.class_id.end()) {
    // Conjugation orbit closure over generator images.
    std::vector<std::pair<QElem, QElem>> conj;  // (s, s^-1)
    for (int i = 0; i < parent().gen_count(); ++i) {
      Elem g = parent().generator(i);
      for (const Elem& s : {g, parent().inv(g)}) {
        QElem qs = pi(s);
        conj.emplace_back(qs, qinv(qs));
      }
    }
    int id = (int)c.classes.size();
    std::vector<QElem> orbit{a};
    std::unordered_set<std::string> seen{qkey(a)};
    for (size_t head = 0; head < orbit.size(); ++head) {
      QElem cur = orbit[head];  // copy: orbit may reallocate
      for (const auto& [s, si] : conj) {
        QElem r = qmul(qmul(s, cur), si);
        if (seen.insert(qkey(r)).second) {
          if ((long long)orbit.size() + 1 > budget_)
            fail_budget("conjugacy orbit in quotient '" + label() + "' exceeds budget");
          orbit.push_back(std::move(r));
        }
      }
    }
    for (const QElem& q : orbit) c.class_id.emplace(qkey(q), id);
    c.classes.push_back(std::move(orbit));
    it = c.class_id.find(qkey(a));
  }
  return c.classes[it->second];
}

bool Quotient::same_class(const QElem& a, const QElem& b) const {
  if (a == b) return true;
  class_of(a);  // ensure a's orbit is labeled
  Cache& c = cache();
  std::lock_guard<std::mutex> lk(c.mu);
  auto ia = c.class_id.find(qkey(a));
  auto ib = c.class_id.find(qkey(b));
  return ib != c.class_id.end() && ia->second == ib->second;
}

long long Quotient::class_size(const QElem& a) const { return (long long)class_of(a).size(); }

namespace {

class ZModQuotient final : public Quotient {
 public:
  ZModQuotient(std::shared_ptr<const Group> g, long long n) : g_(std::move(g)), n_(n) {
    if (g_->name() != "z") fail_parse("iZ quotients require the group z");
    if (n_ < 1) fail_parse("iZ modulus must be >= 1");
  }
  const Group& parent() const override { return *g_; }
  std::string label() const override { return "Z/" + std::to_string(n_); }
  QElem pi(const Elem& e) const override { return {((e.c[0] % n_) + n_) % n_}; }
  QElem qid() const override { return {0}; }
  QElem qmul(const QElem& a, const QElem& b) const override { return {(a[0] + b[0]) % n_}; }
  QElem qinv(const QElem& a) const override { return {(n_ - a[0]) % n_}; }

 private:
  std::shared_ptr<const Group> g_;
  long long n_;
};

// Quotient by the trivial subgroup: pi is the identity, target = parent
// (finite parents only; enumeration enforces the budget).
class IdentityQuotient final : public Quotient {
 public:
  explicit IdentityQuotient(std::shared_ptr<const Group> g) : g_(std::move(g)) {
    if (g_->name().rfind("cyclic", 0) != 0)
      fail_parse("trivial-subgroup quotient supported for finite cyclic groups");
  }
  const Group& parent() const override { return *g_; }
  std::string label() const override { return g_->name() + "/{e}"; }
  QElem pi(const Elem& e) const override { return e.c; }
  QElem qid() const override { return g_->identity().c; }
  QElem qmul(const QElem& a, const QElem& b) const override {
    return g_->mul(Elem{a, 0}, Elem{b, 0}).c;
  }
  QElem qinv(const QElem& a) const override { return g_->inv(Elem{a, 0}).c; }

 private:
  std::shared_ptr<const Group> g_;
};

// SL2(Z) -> SL2(Z/N), optionally crossed with the Z/12 character (the
// composite mirrors intersecting a congruence subgroup with the character
// kernel).  N = 1 with the character gives the plain Z/12 quotient.
class SL2ModQuotient final : public Quotient {
 public:
  SL2ModQuotient(std::shared_ptr<const Group> g, long long n, bool with_psi)
      : g_(std::move(g)), n_(n), psi_(with_psi) {
    if (g_->name() != "sl2z") fail_parse("mod-N quotients require the group sl2z");
    if (n_ < 1) fail_parse("congruence level must be >= 1");
    if (n_ == 1 && !psi_) fail_parse("trivial quotient (N=1 without character) is not useful");
  }
  const Group& parent() const override { return *g_; }
  std::string label() const override {
    std::string base = "SL2(Z/" + std::to_string(n_) + ")";
    if (n_ == 1) return "Z/12";
    return psi_ ? base + "xZ/12" : base;
  }
  QElem pi(const Elem& e) const override {
    QElem q(psi_ ? 5 : 4);
    for (int i = 0; i < 4; ++i) q[i] = ((e.c[i] % n_) + n_) % n_;
    if (psi_) q[4] = ((e.tag % 12) + 12) % 12;
    return q;
  }
  QElem qid() const override {
    QElem q(psi_ ? 5 : 4, 0);
    q[0] = q[3] = 1 % n_;
    return q;
  }
  QElem qmul(const QElem& a, const QElem& b) const override {
    QElem q(a.size());
    q[0] = (a[0] * b[0] + a[1] * b[2]) % n_;
    q[1] = (a[0] * b[1] + a[1] * b[3]) % n_;
    q[2] = (a[2] * b[0] + a[3] * b[2]) % n_;
    q[3] = (a[2] * b[1] + a[3] * b[3]) % n_;
    if (psi_) q[4] = (a[4] + b[4]) % 12;
    return q;
  }
  QElem qinv(const QElem& a) const override {
    QElem q(a.size());
    q[0] = a[3];
    q[1] = (n_ - a[1]) % n_;
    q[2] = (n_ - a[2]) % n_;
    q[3] = a[0];
    if (psi_) q[4] = (12 - a[4]) % 12;
    return q;
  }

 private:
  std::shared_ptr<const Group> g_;
  long long n_;
  bool psi_;
};

}  // namespace

std::shared_ptr<const Quotient> make_quotient(std::shared_ptr<const Group> g,
                                              const std::string& spec) {
  if (spec.rfind("iZ:", 0) == 0 || spec.rfind("iz:", 0) == 0)
    return std::make_shared<ZModQuotient>(g, parse_ll_or_fail(spec.substr(3), "iZ quotient"));
  if (spec == "trivial") return std::make_shared<IdentityQuotient>(g);
  if (spec.rfind("mod+psi:", 0) == 0)
    return std::make_shared<SL2ModQuotient>(g, parse_ll_or_fail(spec.substr(8), "mod+psi"), true);
  if (spec.rfind("mod:", 0) == 0)
    return std::make_shared<SL2ModQuotient>(g, parse_ll_or_fail(spec.substr(4), "mod"), false);
  if (spec == "psi")
    // Composite at level 3: the smallest congruence level whose composite
    // with the character shows no false conjugacy within the default cap.
    return std::make_shared<SL2ModQuotient>(g, 3, true);
  if (spec == "psi-only") return std::make_shared<SL2ModQuotient>(g, 1, true);
  fail_parse("unknown quotient spec '" + spec + "'");
}

Tower make_tower(std::shared_ptr<const Group> g, const std::string& spec) {
  std::string s = spec;
  if (s.rfind("tower:", 0) == 0) s = s.substr(6);
  Tower t;
  t.label = s;
  if (s.rfind("iZ:", 0) == 0 || s.rfind("iz:", 0) == 0) {
    for (long long n : parse_int_list(s.substr(3), "iZ tower"))
      t.quotients.push_back(make_quotient(g, "iZ:" + std::to_string(n)));
    return t;
  }
  if (s.rfind("congruence+psi:", 0) == 0) {
    for (long long n : parse_int_list(s.substr(15), "congruence tower")) {
      if (n < 2) fail_parse("congruence level must be >= 2 in a tower");
      t.quotients.push_back(make_quotient(g, "mod+psi:" + std::to_string(n)));
    }
    return t;
  }
  if (s.rfind("congruence:", 0) == 0) {
    for (long long n : parse_int_list(s.substr(11), "congruence tower")) {
      if (n < 2) fail_parse("congruence level must be >= 2 in a tower");
      t.quotients.push_back(make_quotient(g, "mod:" + std::to_string(n)));
    }
    return t;
  }
  // Anything else: a single quotient as a one-element tower.
  t.quotients.push_back(make_quotient(g, s));
  return t;
}

InjectiveRadius injective_radius(const Quotient& q, const ConjClass& cls, int cap,
                                 long long max_states) {
  if (q.parent().name() != cls.group().name())
    fail_parse("injective_radius: class and quotient have different parent groups");
  BallData ball = ball_data(q.parent(), cap, max_states);
  QElem target = q.pi(cls.rep());
  for (size_t i = 0; i < ball.elems.size(); ++i) {
    if (cls.member(ball.elems[i])) continue;
    if (q.same_class(q.pi(ball.elems[i]), target)) {
      // First violator in BFS order has minimal length; radius is one less.
      // (A violator at length 0 yields -1: the quotient identifies the class
      // with the identity's class already.)
      return {ball.length[i] - 1, false};
    }
  }
  return {cap, true};
}

DistinguishResult distinguishes(const Tower& tower, const ConjClass& cls,
                                const std::vector<Elem>& F) {
  DistinguishResult out;
  out.violating.resize(tower.quotients.size(), 0);
  for (size_t i = 0; i < tower.quotients.size(); ++i) {
    const Quotient& q = *tower.quotients[i];
    QElem target = q.pi(cls.rep());
    for (const Elem& beta : F) {
      if (cls.member(beta)) continue;
      if (q.same_class(q.pi(beta), target)) ++out.violating[i];
    }
  }
  int k = (int)tower.quotients.size();
  while (k > 0 && out.violating[k - 1] == 0) --k;
  if (k == (int)tower.quotients.size()) return out;  // found = false
  out.found = true;
  out.index = k;
  out.label = tower.quotients[k]->label();
  return out;
}

SeparationRate separation_rate(const Tower& tower, const ConjClass& cls, int cap) {
  SeparationRate out;
  long long min_size = -1, max_size = -1;
  bool any_exact = false;
  for (size_t i = 0; i < tower.quotients.size(); ++i) {
    const Quotient& q = *tower.quotients[i];
    SeparationRow row;
    row.index = (int)i;
    row.label = q.label();
    row.radius = injective_radius(q, cls, cap);
    row.class_size = q.class_size(q.pi(cls.rep()));
    any_exact = any_exact || !row.radius.at_cap;
    min_size = min_size < 0 ? row.class_size : std::min(min_size, row.class_size);
    max_size = std::max(max_size, row.class_size);
    out.rows.push_back(std::move(row));
  }
  out.lower_bound_only = !any_exact;
  if (max_size == min_size || out.rows.size() < 2) {
    out.bounded_classes = true;
    out.rate = 0.0;
    return out;
  }
  std::vector<double> xs, ys;
  for (const auto& r : out.rows) {
    xs.push_back((double)r.radius.value);
    ys.push_back(std::log((double)r.class_size));
  }
  double spread = *std::max_element(xs.begin(), xs.end()) - *std::min_element(xs.begin(), xs.end());
  if (spread == 0.0) {
    // Radii indistinguishable at this cap: only a lower bound on the rate.
    out.lower_bound_only = true;
    out.rate = 0.0;
    return out;
  }
  out.rate = std::max(0.0, fit_line(xs, ys).slope);
  return out;
}

}  // namespace etalab
