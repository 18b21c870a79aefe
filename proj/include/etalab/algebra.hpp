#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "etalab/group.hpp"
#include "etalab/quotient.hpp"
#include "etalab/rational.hpp"

namespace etalab {

// Finitely supported Gamma -> Q(i) function with exact coefficients.  Zero
// coefficients are pruned on entry so the support map is canonical; terms are
// keyed by the element's canonical byte key, giving deterministic iteration.
class AlgebraElem {
 public:
  explicit AlgebraElem(std::shared_ptr<const Group> g) : group_(std::move(g)) {}

  const Group& group() const { return *group_; }
  const std::shared_ptr<const Group>& group_ptr() const { return group_; }

  void add(const Elem& e, const RatC& c);

  struct Term {
    Elem elem;
    RatC coeff;
  };
  const std::map<std::string, Term>& terms() const { return terms_; }
  size_t support_size() const { return terms_.size(); }

  RatC coeff_sum() const;
  // Max word length over the support (exact BFS); cap overrun -> Budget.
  int support_radius(int cap = 12) const;

  AlgebraElem operator+(const AlgebraElem& other) const;
  AlgebraElem scaled(const RatC& c) const;

 private:
  std::shared_ptr<const Group> group_;
  std::map<std::string, Term> terms_;
};

// Convenience builder from (word spec, coefficient) pairs.
AlgebraElem make_algebra_elem(std::shared_ptr<const Group> g,
                              const std::vector<std::pair<std::string, RatC>>& entries);

// Sum of coefficients over support ∩ class.
RatC algebra_trace(const AlgebraElem& f, const ConjClass& cls);

// Image of f in the quotient: coefficients summed along fibers of pi.
class QAlgebraElem {
 public:
  explicit QAlgebraElem(const Quotient* q) : q_(q) {}
  const Quotient& quotient() const { return *q_; }

  void add(const QElem& e, const RatC& c);

  struct Term {
    QElem elem;
    RatC coeff;
  };
  const std::map<std::string, Term>& terms() const { return terms_; }
  RatC coeff_sum() const;

 private:
  const Quotient* q_;
  std::map<std::string, Term> terms_;
};

QAlgebraElem pushforward(const AlgebraElem& f, const Quotient& q);

// Sum of pushed coefficients over the conjugacy class of `rep` in the target.
RatC q_trace(const QAlgebraElem& pf, const QElem& rep);

struct StabilizationRow {
  std::string label;
  RatC pushed_trace;
  bool matches_limit = false;
};
struct StabilizationReport {
  RatC limit;  // tr over the class upstairs
  std::vector<StabilizationRow> rows;
  int index = -1;  // first i with rows[j] == limit for every j >= i; -1 if none
  bool stabilized = false;
};

// Pushed trace along the tower, with the first index from which every later
// quotient reproduces the upstairs class trace exactly.
StabilizationReport trace_stabilization(const AlgebraElem& f, const Tower& tower,
                                        const ConjClass& cls);

}  // namespace etalab
