#pragma once
#include <memory>
#include <string>
#include <vector>

#include "etalab/group.hpp"

namespace etalab {

using QElem = std::vector<long long>;

inline constexpr long long kDefaultOrderBudget = 1'000'000;

// A finite quotient of a finitely generated group, given by an evaluable
// homomorphism pi.  The target is realized as the image of pi, enumerated
// lazily by closure over generator images (budget-checked).  Conjugacy in the
// target is decided by orbit enumeration with memoized class tables.
class Quotient {
 public:
  virtual ~Quotient() = default;
  virtual const Group& parent() const = 0;
  virtual std::string label() const = 0;
  virtual QElem pi(const Elem& e) const = 0;
  virtual QElem qid() const = 0;
  virtual QElem qmul(const QElem& a, const QElem& b) const = 0;
  virtual QElem qinv(const QElem& a) const = 0;

  long long order() const;
  const std::vector<QElem>& elements() const;
  bool same_class(const QElem& a, const QElem& b) const;
  std::vector<QElem> class_of(const QElem& a) const;
  long long class_size(const QElem& a) const;

  void set_order_budget(long long b) { budget_ = b; }
  long long order_budget() const { return budget_; }

 protected:
  long long budget_ = kDefaultOrderBudget;

 private:
  struct Cache;
  Cache& cache() const;
  mutable std::shared_ptr<Cache> cache_;
};

// Single-quotient specs (also usable as 1-element towers):
//   over z (d=1):    "iZ:5"          Z -> Z/5
//   over cyclic(k):  "trivial"       quotient by the trivial subgroup (pi = id)
//   over sl2z:       "mod:7"         reduction SL2(Z) -> SL2(Z/7)
//                    "psi"           the composite SL2(Z/3) x Z/12 quotient
//                    "mod+psi:7"     composite SL2(Z/7) x Z/12
std::shared_ptr<const Quotient> make_quotient(std::shared_ptr<const Group> g,
                                              const std::string& spec);

struct Tower {
  std::string label;
  std::vector<std::shared_ptr<const Quotient>> quotients;
};

// Tower specs (optionally prefixed "tower:"):
//   "iZ:2,4,8,16" | "iZ:2..20"             over z
//   "congruence:2..20"                     over sl2z, targets SL2(Z/N)
//   "congruence+psi:2..16"                 over sl2z, targets SL2(Z/N) x Z/12
//   "psi"                                  over sl2z, the single composite quotient
//   "trivial"                              over cyclic(k)
Tower make_tower(std::shared_ptr<const Group> g, const std::string& spec);

struct InjectiveRadius {
  int value = 0;      // exact value if !at_cap, else the cap
  bool at_cap = false;  // no violator found within the cap: radius >= cap
};

// Largest n <= cap such that every gamma with l(gamma) <= n outside cls maps
// outside the class of pi(rep).  at_cap marks ">= cap" (never fabricates a
// finite value when no violator was found).
InjectiveRadius injective_radius(const Quotient& q, const ConjClass& cls, int cap,
                                 long long max_states = 5'000'000);

struct DistinguishResult {
  bool found = false;
  int index = -1;        // smallest k with all tested i >= k violator-free
  std::string label;     // label of the k-th quotient
  std::vector<int> violating;  // per-quotient violator counts over F
};

// Smallest index k such that every quotient from k on maps no element of
// F \ cls into the class of the image of cls's representative.
DistinguishResult distinguishes(const Tower& tower, const ConjClass& cls,
                                const std::vector<Elem>& F);

struct SeparationRow {
  int index;
  std::string label;
  InjectiveRadius radius;
  long long class_size;
};

struct SeparationRate {
  std::vector<SeparationRow> rows;
  double rate = 0.0;        // least-squares slope of log|class| vs radius
  bool lower_bound_only = false;  // all radii hit the cap
  bool bounded_classes = false;   // class sizes bounded => rate 0
};

SeparationRate separation_rate(const Tower& tower, const ConjClass& cls, int cap);

}  // namespace etalab
