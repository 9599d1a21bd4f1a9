#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crl/common.hpp"
#include "crl/scenarios.hpp"

namespace crl {

enum class CellCode : int {
  Wall = 0,
  Free = 1,
  RoughDebris = 2,
  RoughColumn = 3,
  SmoothDebris = 4,
  SmoothColumn = 5,
  AgentStart = 6,
  Goal = 7,
  Agent = 8,
};
inline constexpr int kNumCellCodes = 9;

/// Absolute grid translations: forward = north, backward = south, left = west, right = east.
enum class Action : int { Forward = 0, Backward = 1, Left = 2, Right = 3 };
inline constexpr int kNumActions = 4;

struct Pos {
  int row = 0;
  int col = 0;
  bool operator==(const Pos&) const = default;
};

Pos displaced(Pos p, Action a);

CellCode object_code(Texture texture, Shape shape);

struct ObjectInstance {
  Pos position;
  Texture texture = Texture::Rough;
  Shape shape = Shape::Debris;
  bool movable = false;
  bool moved_ever = false;
  bool door = false;  // placed in the room boundary
  bool operator==(const ObjectInstance&) const = default;
};

struct EnvConfig {
  int grid_size = 20;
  int room_size = 7;  // outer extent of the walled room, walls included
  bool room_randomized = false;
  int n_objects = 18;  // door objects included
  int max_steps = 800;
  CausalLaw law = CausalLaw::TextureOnly;
  int n_door_objects = 2;
  std::uint64_t seed = 0;
  int max_layout_retries = 1000;

  void validate() const;
};

struct EnvCounters {
  int movable_interactions = 0;
  int immovable_interactions = 0;
  bool reached_goal = false;
  int steps_to_goal = -1;
  bool operator==(const EnvCounters&) const = default;
};

struct EnvState {
  int size = 0;
  int max_steps = 800;
  std::vector<CellCode> terrain;  // Wall, Free, AgentStart or Goal
  std::vector<ObjectInstance> objects;
  Pos agent;
  Pos start;
  Pos goal;
  Pos room_origin;  // top-left wall cell of the room
  int room_size = 0;
  Action facing = Action::Forward;
  int step_count = 0;
  bool done = false;
  bool last_blocked = false;
  EnvCounters counters;

  bool in_bounds(Pos p) const { return p.row >= 0 && p.col >= 0 && p.row < size && p.col < size; }
  CellCode terrain_at(Pos p) const { return terrain[static_cast<std::size_t>(p.row * size + p.col)]; }
  int object_at(Pos p) const;
  /// Visible code: agent over object over terrain; out of bounds reads as wall.
  CellCode cell(Pos p) const;
  bool inside_room(Pos p) const;

  bool operator==(const EnvState&) const = default;
};

enum class StepEvent { Moved, BlockedWall, BlockedImmovable, Pushed, BlockedPush, ReachedGoal };

struct StepInfo {
  StepEvent event = StepEvent::Moved;
  int object_index = -1;  // object touched by this step, if any
  bool truncated = false;
};

struct StepOutcome {
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct Transition {
  EnvState state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// min(10 + (max_steps - step_count) / max_steps * 10, 20)
double goal_reward(int step_count, int max_steps);

/// Random layout: walled room with door objects in its boundary, goal inside, agent and the
/// remaining objects outside. Layouts are rejected until the goal is reachable by pushing doors.
EnvState generate_layout(const EnvConfig& cfg, Rng& rng);

/// Pure transition.
Transition step(const EnvState& s, Action a);
/// Same transition applied in place.
StepOutcome step_inplace(EnvState& s, Action a);

CellCode local_view(const EnvState& s);

/// Goal reachable when every movable object is treated as passable.
bool reachable_with_movables_passable(const EnvState& s);

/// Goal reachable by walking and pushing door objects, other objects held fixed.
/// Breadth-first over (agent, door positions); false if `state_cap` states are exceeded.
bool solvable_by_door_pushes(const EnvState& s, std::size_t state_cap = 2'000'000);

/// One character per cell: # . r R s S A G @
std::string render(const EnvState& s);

/// Inverse of render for hand-built maps. Object movability comes from `law`; '@' marks the
/// agent standing on its start cell.
EnvState parse_layout(std::string_view text, CausalLaw law, int max_steps);

}  // namespace crl
