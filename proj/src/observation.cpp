#include "crl/observation.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace crl {

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::NonCausal: return "non-causal";
    case AgentKind::CausalOracle: return "causal";
    case AgentKind::CausalDiscovered: return "causal-discovered";
  }
  return "?";
}

AgentKind parse_agent_kind(std::string_view text) {
  if (text == "non-causal" || text == "non_causal") return AgentKind::NonCausal;
  if (text == "causal" || text == "causal-oracle" || text == "causal_oracle") return AgentKind::CausalOracle;
  if (text == "causal-discovered" || text == "causal_discovered") return AgentKind::CausalDiscovered;
  throw Error(fmt::format("unknown agent kind '{}'", text));
}

void ActionHistory::push(Action a) {
  std::rotate(slots_.rbegin(), slots_.rbegin() + 1, slots_.rend());
  slots_[0] = static_cast<int>(a);
}

std::array<double, 4> causal_slots(AgentKind kind, CausalLaw law, const DigitalMind* mind) {
  std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
  for (ObjectType t : kObjectTypes) {
    double v = 0.0;
    if (kind == AgentKind::CausalOracle) v = law_movability(law, t.texture, t.shape) ? 1.0 : 0.0;
    else if (kind == AgentKind::CausalDiscovered) v = mind ? mind->probability(t) : 0.5;
    out[type_slot(t)] = v;
  }
  return out;
}

Eigen::VectorXd build_observation(const EnvState& s, const ActionHistory& history, AgentKind kind,
                                  const std::array<double, 4>& slots) {
  Eigen::VectorXd o = Eigen::VectorXd::Zero(observation_width(kind));
  const double scale = static_cast<double>(std::max(1, s.size - 1));
  o[kObsPosition] = 2.0 * s.agent.row / scale - 1.0;
  o[kObsPosition + 1] = 2.0 * s.agent.col / scale - 1.0;
  o[kObsGoalOffset] = (s.goal.row - s.agent.row) / scale;
  o[kObsGoalOffset + 1] = (s.goal.col - s.agent.col) / scale;
  o[kObsView + static_cast<int>(local_view(s))] = 1.0;
  o[kObsCollision] = s.last_blocked ? 1.0 : 0.0;
  for (int i = 0; i < ActionHistory::kLength; ++i)
    if (history.at(i) >= 0) o[kObsHistory + i * kNumActions + history.at(i)] = 1.0;
  if (is_causal(kind))
    for (int i = 0; i < 4; ++i) o[kObsCausal + i] = slots[static_cast<std::size_t>(i)];
  return o;
}

}  // namespace crl
