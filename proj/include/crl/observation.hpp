#pragma once

#include <array>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "crl/digital_mind.hpp"
#include "crl/gridworld.hpp"

namespace crl {

enum class AgentKind { NonCausal, CausalOracle, CausalDiscovered };

std::string to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view text);
inline bool is_causal(AgentKind k) { return k != AgentKind::NonCausal; }

/// Most recent action first; empty slots encode as all-zero one-hots.
class ActionHistory {
 public:
  static constexpr int kLength = 4;
  void push(Action a);
  void clear() { slots_.fill(-1); }
  int at(int i) const { return slots_[static_cast<std::size_t>(i)]; }

 private:
  std::array<int, kLength> slots_{-1, -1, -1, -1};
};

// Slot layout:
//   [0, 2)   agent row/col scaled to [-1, 1]
//   [2, 4)   goal minus agent, divided by (grid - 1)
//   [4, 13)  one-hot of the cell in front of the agent
//   [13]     previous step was blocked
//   [14, 30) one-hot of the last four actions
//   [30, 34) movability per object type (causal agents only)
inline constexpr int kObsPosition = 0;
inline constexpr int kObsGoalOffset = 2;
inline constexpr int kObsView = 4;
inline constexpr int kObsCollision = 13;
inline constexpr int kObsHistory = 14;
inline constexpr int kObsCausal = 30;
inline constexpr int kObsWidthNonCausal = 30;
inline constexpr int kObsWidthCausal = 34;

inline int observation_width(AgentKind kind) { return is_causal(kind) ? kObsWidthCausal : kObsWidthNonCausal; }

/// Causal slot values: exact law movability for the oracle agent, learned probabilities
/// for the discovering agent.
std::array<double, 4> causal_slots(AgentKind kind, CausalLaw law, const DigitalMind* mind);

Eigen::VectorXd build_observation(const EnvState& s, const ActionHistory& history, AgentKind kind,
                                  const std::array<double, 4>& slots);

}  // namespace crl
