#include "etalab/cayley.hpp"

#include <functional>
#include <string>
#include <unordered_set>

#include "etalab/error.hpp"

namespace etalab {

namespace {

// Shared BFS core.  visit(elem, length) is called once per distinct element
// in BFS order; return false from should_continue to stop after the current
// radius completes.
void bfs(const Group& g, int radius, long long max_states,
         const std::function<void(const Elem&, int)>& visit) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> frontier{elem_key(g.identity())};
  seen.insert(frontier.front());
  visit(g.identity(), 0);
  const size_t nc = g.coord_count();
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::string> next;
    for (const std::string& key : frontier) {
      Elem cur = elem_from_key(key, nc);
      for (int i = 0; i < g.gen_count(); ++i) {
        for (int s = 0; s < 2; ++s) {
          Elem nb = g.mul_gen(cur, i, s == 1);
          std::string nk = elem_key(nb);
          if (seen.insert(nk).second) {
            if ((long long)seen.size() > max_states)
              fail_budget("BFS state budget exceeded at radius " + std::to_string(r) +
                          " (completed radius " + std::to_string(r - 1) + ")");
            visit(nb, r);
            next.push_back(std::move(nk));
          }
        }
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;  // whole (finite) group reached
  }
}

}  // namespace

std::vector<long long> ball_counts(const Group& g, int radius, long long max_states) {
  if (radius < 0) fail_parse("ball radius must be >= 0");
  std::vector<long long> counts(radius + 1, 0);
  long long total = 0;
  int reached = 0;
  bfs(g, radius, max_states, [&](const Elem&, int r) {
    ++total;
    counts[r] = total;
    reached = r;
  });
  // Radii past the last growth (finite group exhausted) stay cumulative.
  for (int r = 1; r <= radius; ++r)
    if (counts[r] < counts[r - 1]) counts[r] = counts[r - 1];
  (void)reached;
  return counts;
}

long long ball_count(const Group& g, int radius, long long max_states) {
  return ball_counts(g, radius, max_states).back();
}

BallData ball_data(const Group& g, int radius, long long max_states) {
  if (radius < 0) fail_parse("ball radius must be >= 0");
  BallData out;
  out.counts.assign(radius + 1, 0);
  bfs(g, radius, max_states, [&](const Elem& e, int r) {
    out.elems.push_back(e);
    out.length.push_back(r);
    out.counts[r] = (long long)out.elems.size();
  });
  for (int r = 1; r <= radius; ++r)
    if (out.counts[r] < out.counts[r - 1]) out.counts[r] = out.counts[r - 1];
  return out;
}

std::optional<int> word_length(const Group& g, const Elem& e, int cap, long long max_states) {
  std::optional<int> found;
  const std::string target = elem_key(e);
  // elem_key includes the tag byte-for-byte; equal canonical forms always
  // carry equal tags (the tag is a homomorphic function of the element), so
  // key equality is element equality.
  bfs(g, cap, max_states, [&](const Elem& cur, int r) {
    if (!found && elem_key(cur) == target) found = r;
  });
  return found;
}

long long class_ball_count(const Group& g, const ConjClass& cls, int n, long long max_states) {
  long long count = 0;
  bfs(g, n, max_states, [&](const Elem& e, int) {
    if (cls.member(e)) ++count;
  });
  return count;
}

}  // namespace etalab
