#pragma once
#include <optional>
#include <vector>

#include "etalab/group.hpp"

namespace etalab {

inline constexpr long long kDefaultStateBudget = 5'000'000;
inline constexpr int kDefaultRadiusCap = 12;

// Cumulative ball sizes counts[r] = #{g : l(g) <= r} for r = 0..radius, by
// breadth-first search with canonical-form deduplication.  Memory-light: only
// hash keys and the current/next spheres are held.
std::vector<long long> ball_counts(const Group& g, int radius,
                                   long long max_states = kDefaultStateBudget);

long long ball_count(const Group& g, int radius, long long max_states = kDefaultStateBudget);

// Full ball with BFS order and per-element word lengths; for small radii
// (conjugacy and algebra work on the matrix group).
struct BallData {
  std::vector<Elem> elems;    // BFS order: nondecreasing length
  std::vector<int> length;    // length[i] = word length of elems[i]
  std::vector<long long> counts;  // cumulative, counts[r] for r = 0..radius
};
BallData ball_data(const Group& g, int radius, long long max_states = kDefaultStateBudget);

// Shortest word length of e over the symmetric generating set, or nullopt if
// it exceeds `cap` (the exceeds-cap marker; never a wrong number).
std::optional<int> word_length(const Group& g, const Elem& e, int cap = kDefaultRadiusCap,
                               long long max_states = kDefaultStateBudget);

// #(ball of radius n intersect cls).
long long class_ball_count(const Group& g, const ConjClass& cls, int n,
                           long long max_states = kDefaultStateBudget);

}  // namespace etalab
