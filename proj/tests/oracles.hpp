#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "crl/bayes.hpp"
#include "crl/gridworld.hpp"

namespace crl::testing {

inline constexpr std::string_view kMap5 =
    "#####\n"
    "#.s.#\n"
    "#.r.#\n"
    "#..G#\n"
    "#####\n";

// Map text with the agent and the movable object at the given cells.
inline std::string place(Pos agent, Pos movable) {
  std::string rows[5] = {"#####", "#...#", "#.r.#", "#..G#", "#####"};
  rows[movable.row][static_cast<std::size_t>(movable.col)] = 's';
  rows[agent.row][static_cast<std::size_t>(agent.col)] = '@';
  std::string out;
  for (auto& r : rows) out += r + "\n";
  return out;
}

struct Expected {
  Pos agent;
  Pos movable;
  StepEvent event;
  double reward;
  bool done;
  int movable_hits;
  int immovable_hits;
};

// Independent rule set for the 5x5 map: walls on the border, rough debris fixed at (2,2),
// goal at (3,3), one smooth debris that can be pushed onto empty floor.
inline Expected oracle(Pos agent, Pos movable, Action a, int step, int max_steps) {
  static const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
  const int k = static_cast<int>(a);
  const Pos t{agent.row + dr[k], agent.col + dc[k]};
  auto wall = [](Pos p) { return p.row <= 0 || p.col <= 0 || p.row >= 4 || p.col >= 4; };
  const Pos rough{2, 2}, goal{3, 3};
  Expected e{agent, movable, StepEvent::Moved, 0.0, false, 0, 0};
  if (wall(t)) {
    e.event = StepEvent::BlockedWall;
  } else if (t == rough) {
    e.event = StepEvent::BlockedImmovable;
    e.immovable_hits = 1;
  } else if (t == movable) {
    e.movable_hits = 1;
    const Pos b{t.row + dr[k], t.col + dc[k]};
    if (!wall(b) && !(b == rough) && !(b == goal)) {
      e.agent = t;
      e.movable = b;
      e.event = StepEvent::Pushed;
    } else {
      e.event = StepEvent::BlockedPush;
    }
  } else if (t == goal) {
    e.agent = t;
    e.event = StepEvent::ReachedGoal;
    e.reward = std::min(10.0 + (max_steps - step) / static_cast<double>(max_steps) * 10.0, 20.0);
    e.done = true;
  } else {
    e.agent = t;
  }
  if (!e.done && step + 1 >= max_steps) e.done = true;
  return e;
}

struct OracleRow {
  Pos agent, movable;
  Action a;
  Expected e;
};

// Hand-enumerated transitions on the 5x5 map, step 0 of an 800-step budget.
inline std::vector<OracleRow> hand_table() {
  using enum Action;
  using enum StepEvent;
  return {
      {{1, 1}, {1, 2}, Right, {{1, 2}, {1, 3}, Pushed, 0, false, 1, 0}},
      {{1, 1}, {1, 2}, Forward, {{1, 1}, {1, 2}, BlockedWall, 0, false, 0, 0}},
      {{1, 1}, {1, 2}, Backward, {{2, 1}, {1, 2}, Moved, 0, false, 0, 0}},
      {{1, 1}, {1, 2}, Left, {{1, 1}, {1, 2}, BlockedWall, 0, false, 0, 0}},
      {{1, 3}, {1, 2}, Left, {{1, 2}, {1, 1}, Pushed, 0, false, 1, 0}},
      {{1, 2}, {1, 3}, Right, {{1, 2}, {1, 3}, BlockedPush, 0, false, 1, 0}},
      {{1, 2}, {1, 1}, Backward, {{1, 2}, {1, 1}, BlockedImmovable, 0, false, 0, 1}},
      {{2, 3}, {1, 2}, Backward, {{3, 3}, {1, 2}, ReachedGoal, 20, true, 0, 0}},
      {{2, 1}, {3, 1}, Backward, {{2, 1}, {3, 1}, BlockedPush, 0, false, 1, 0}},
      {{3, 1}, {3, 2}, Right, {{3, 1}, {3, 2}, BlockedPush, 0, false, 1, 0}},
      {{2, 3}, {1, 3}, Forward, {{2, 3}, {1, 3}, BlockedPush, 0, false, 1, 0}},
      {{2, 3}, {1, 2}, Left, {{2, 3}, {1, 2}, BlockedImmovable, 0, false, 0, 1}},
      {{3, 2}, {1, 2}, Right, {{3, 3}, {1, 2}, ReachedGoal, 20, true, 0, 0}},
  };
}

// P(node = v | parents as in `a`) straight from the counts.
inline double laplace_oracle(const DirectedGraph& g, const Matrix& data, double alpha, std::size_t node,
                      const std::vector<int>& a) {
  const auto ps = g.parents(node);
  double match = 0, hit = 0;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    bool ok = true;
    for (auto p : ps) ok = ok && static_cast<int>(data(r, static_cast<Eigen::Index>(p))) == a[p];
    if (!ok) continue;
    ++match;
    if (static_cast<int>(data(r, static_cast<Eigen::Index>(node))) == a[node]) ++hit;
  }
  return (hit + alpha) / (match + 2.0 * alpha);
}

// Full joint table, conditioned and marginalized by brute force.
inline double joint_oracle(const DirectedGraph& g, const Matrix& data, double alpha, std::size_t target, int value,
                    const std::map<std::size_t, int>& evidence) {
  const std::size_t d = g.size();
  double num = 0, den = 0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    std::vector<int> a(d);
    for (std::size_t i = 0; i < d; ++i) a[i] = (mask >> i) & 1u;
    bool consistent = true;
    for (auto [k, v] : evidence) consistent = consistent && a[k] == v;
    if (!consistent) continue;
    double p = 1.0;
    for (std::size_t i = 0; i < d; ++i) p *= laplace_oracle(g, data, alpha, i, a);
    den += p;
    if (a[target] == value) num += p;
  }
  return num / den;
}

}  // namespace crl::testing
