#pragma once
#include <string>
#include <vector>

namespace etalab {

// One trigonometric term of the 1-periodic potential: amp * cos(2*pi*freq*x)
// or amp * sin(2*pi*freq*x).
struct PotTerm {
  double amp = 0.0;
  int freq = 0;
  bool sine = false;
};

// The 1-D model family on the circle and its covers.
//   components=1:  D = -i d/dx + 2*pi*theta + c                (no mass, no v)
//   components=2:  D = (-i d/dx + 2*pi*theta) s3 + (m+v(x)) s1 + c
// with s1, s3 the standard Pauli-type matrices and v a real trigonometric
// polynomial multiplying the mass term.  theta is the holonomy twist of the
// base circle; covers lift it (the n-cover Bloch sectors sit at j/n + theta).
struct ModelOperator {
  int components = 1;
  double m = 0.0;      // mass, 2-component only, >= 0
  double c = 0.0;      // scalar shift
  double theta = 0.0;  // holonomy, in [0,1)
  std::vector<PotTerm> v;

  bool has_potential() const { return !v.empty(); }
  double v_at(double x) const;
  // sup|v| bound: sum over distinct frequencies of sqrt(a_j^2 + b_j^2).
  double v_bar() const;
  int v_max_freq() const;
  // m + v_bar + |c|: norm bound of the non-derivative part (Weyl counting).
  double symbol_bound() const;

  // Rigorous line-cover spectral gap lower bound for the 2-component family:
  // m - v_bar - |c|  (may be <= 0, in which case the line operator is not
  // certified invertible).  The 1-component line operator has no gap at all
  // and is rejected outright.
  double certified_line_gap() const;

  // Canonical spec string (round-trips through parse_operator).
  std::string str() const;

  void validate() const;  // field ranges; 1-component forbids m and v
};

struct CoverSpec {
  bool line = false;
  int n = 1;  // ignored when line
  std::string str() const { return line ? "line" : "n=" + std::to_string(n); }
};

}  // namespace etalab
