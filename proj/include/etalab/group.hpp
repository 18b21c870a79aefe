#pragma once
#include <memory>
#include <string>
#include <vector>

namespace etalab {

// Group element in canonical coordinates.  `c` is the canonical form used for
// equality and hashing.  `tag` rides along homomorphically where a group keeps
// an extra abelian invariant of the element (the matrix group uses it for its
// Z/12 character); it is a function of `c`, so it never enters comparisons.
struct Elem {
  std::vector<long long> c;
  int tag = 0;
  friend bool operator==(const Elem& a, const Elem& b) { return a.c == b.c; }
  friend bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }
};

// Byte-serialization of the canonical form (plus tag, which round-trips
// through keys even though equality ignores it).  Used as the hash key in BFS
// and as the map key in group-algebra supports.
std::string elem_key(const Elem& e);
Elem elem_from_key(const std::string& key, size_t coord_count);

class Group {
 public:
  virtual ~Group() = default;
  virtual std::string name() const = 0;
  virtual size_t coord_count() const = 0;  // size of Elem::c
  virtual int gen_count() const = 0;       // generators, inverses not counted
  virtual std::string gen_label(int i) const = 0;
  virtual Elem identity() const = 0;
  virtual Elem generator(int i) const = 0;
  virtual Elem mul(const Elem& a, const Elem& b) const = 0;
  virtual Elem inv(const Elem& a) const = 0;
  virtual std::string format(const Elem& e) const = 0;

  Elem mul_gen(const Elem& a, int i, bool inverse) const;
  Elem pow(const Elem& a, long long e) const;
  // Word grammar: '*'-separated factors "label" or "label^k" (k may be
  // negative); "e" alone is the identity.  Groups with vector coordinates
  // also accept a bare comma-separated integer tuple of matching dimension.
  Elem parse_word(const std::string& word) const;
};

// Specs: "z" / "z:d" / "zd" (d <= 4), "free2" / "f2", "cyclic:k" / "ck",
// "heis3", "sl2z".
std::shared_ptr<const Group> make_group(const std::string& spec);

// A conjugacy class with an exact membership oracle.  Strategies per group:
// abelian groups compare canonical forms; the free group compares cyclic
// words; the Heisenberg group uses the closed-form conjugation orbit; the
// matrix group decides finite-order classes through its Z/12 character
// (membership for infinite-order representatives is refused rather than
// guessed).
class ConjClass {
 public:
  ConjClass(std::shared_ptr<const Group> g, Elem rep, std::string label);
  const Group& group() const { return *group_; }
  const std::shared_ptr<const Group>& group_ptr() const { return group_; }
  const Elem& rep() const { return rep_; }
  const std::string& label() const { return label_; }
  bool member(const Elem& e) const;
  bool is_identity_class() const;

 private:
  std::shared_ptr<const Group> group_;
  Elem rep_;
  std::string label_;
  int strategy_;  // resolved from group name at construction
};

ConjClass make_class(std::shared_ptr<const Group> g, const std::string& word_spec);

}  // namespace etalab
