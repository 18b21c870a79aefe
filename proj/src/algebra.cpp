#include "etalab/algebra.hpp"

#include <cstring>

#include "etalab/cayley.hpp"
#include "etalab/error.hpp"

namespace etalab {

namespace {

std::string qelem_key(const QElem& v) {
  std::string k(v.size() * sizeof(long long), '\0');
  memcpy(k.data(), v.data(), v.size() * sizeof(long long));
  return k;
}

}  // namespace

void AlgebraElem::add(const Elem& e, const RatC& c) {
  if (c.is_zero()) return;
  std::string k = elem_key(e);
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    terms_.emplace(std::move(k), Term{e, c});
    return;
  }
  it->second.coeff = it->second.coeff + c;
  if (it->second.coeff.is_zero()) terms_.erase(it);
}

RatC AlgebraElem::coeff_sum() const {
  RatC s;
  for (const auto& [k, t] : terms_) s = s + t.coeff;
  return s;
}

int AlgebraElem::support_radius(int cap) const {
  int r = 0;
  for (const auto& [k, t] : terms_) {
    auto len = word_length(*group_, t.elem, cap);
    if (!len) fail_budget("support element exceeds the word-length cap " + std::to_string(cap));
    r = std::max(r, *len);
  }
  return r;
}

AlgebraElem AlgebraElem::operator+(const AlgebraElem& other) const {
  if (group_->name() != other.group_->name())
    fail_precondition("algebra sum needs both elements over the same group");
  AlgebraElem out = *this;
  for (const auto& [k, t] : other.terms_) out.add(t.elem, t.coeff);
  return out;
}

AlgebraElem AlgebraElem::scaled(const RatC& c) const {
  AlgebraElem out(group_);
  for (const auto& [k, t] : terms_) out.add(t.elem, t.coeff * c);
  return out;
}

AlgebraElem make_algebra_elem(std::shared_ptr<const Group> g,
                              const std::vector<std::pair<std::string, RatC>>& entries) {
  AlgebraElem f(g);
  for (const auto& [word, c] : entries) f.add(g->parse_word(word), c);
  return f;
}

RatC algebra_trace(const AlgebraElem& f, const ConjClass& cls) {
  if (f.group().name() != cls.group().name())
    fail_precondition("algebra_trace needs the element and class over the same group");
  RatC s;
  for (const auto& [k, t] : f.terms())
    if (cls.member(t.elem)) s = s + t.coeff;
  return s;
}

void QAlgebraElem::add(const QElem& e, const RatC& c) {
  if (c.is_zero()) return;
  std::string k = qelem_key(e);
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    terms_.emplace(std::move(k), Term{e, c});
    return;
  }
  it->second.coeff = it->second.coeff + c;
  if (it->second.coeff.is_zero()) terms_.erase(it);
}

RatC QAlgebraElem::coeff_sum() const {
  RatC s;
  for (const auto& [k, t] : terms_) s = s + t.coeff;
  return s;
}

QAlgebraElem pushforward(const AlgebraElem& f, const Quotient& q) {
  if (f.group().name() != q.parent().name())
    fail_precondition("pushforward needs a quotient of the element's group");
  QAlgebraElem out(&q);
  for (const auto& [k, t] : f.terms()) out.add(q.pi(t.elem), t.coeff);
  return out;
}

RatC q_trace(const QAlgebraElem& pf, const QElem& rep) {
  const Quotient& q = pf.quotient();
  RatC s;
  for (const auto& [k, t] : pf.terms())
    if (q.same_class(t.elem, rep)) s = s + t.coeff;
  return s;
}

StabilizationReport trace_stabilization(const AlgebraElem& f, const Tower& tower,
                                        const ConjClass& cls) {
  if (tower.quotients.empty()) fail_parse("trace stabilization needs a nonempty tower");
  StabilizationReport rep;
  rep.limit = algebra_trace(f, cls);
  for (const auto& q : tower.quotients) {
    QAlgebraElem pf = pushforward(f, *q);
    RatC tr = q_trace(pf, q->pi(cls.rep()));
    rep.rows.push_back({q->label(), tr, tr == rep.limit});
  }
  int idx = -1;
  for (int i = (int)rep.rows.size() - 1; i >= 0; --i) {
    if (!rep.rows[i].matches_limit) break;
    idx = i;
  }
  rep.index = idx;
  rep.stabilized = idx >= 0;
  return rep;
}

}  // namespace etalab
