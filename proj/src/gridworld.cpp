#include "crl/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include <fmt/format.h>

namespace crl {

Pos displaced(Pos p, Action a) {
  switch (a) {
    case Action::Forward: return {p.row - 1, p.col};
    case Action::Backward: return {p.row + 1, p.col};
    case Action::Left: return {p.row, p.col - 1};
    case Action::Right: return {p.row, p.col + 1};
  }
  return p;
}

CellCode object_code(Texture texture, Shape shape) {
  if (texture == Texture::Rough) return shape == Shape::Debris ? CellCode::RoughDebris : CellCode::RoughColumn;
  return shape == Shape::Debris ? CellCode::SmoothDebris : CellCode::SmoothColumn;
}

void EnvConfig::validate() const {
  if (room_size < 3) throw Error("EnvConfig: room_size must be >= 3 so the room has an interior");
  if (room_size + 2 > grid_size) throw Error("EnvConfig: room_size + 2 must not exceed grid_size");
  if (n_door_objects < 1) throw Error("EnvConfig: at least one door object is required");
  if (n_objects < n_door_objects) throw Error("EnvConfig: n_objects must be >= n_door_objects");
  if (max_steps < 1) throw Error("EnvConfig: max_steps must be >= 1");
  if (max_layout_retries < 1) throw Error("EnvConfig: max_layout_retries must be >= 1");
}

int EnvState::object_at(Pos p) const {
  for (std::size_t i = 0; i < objects.size(); ++i)
    if (objects[i].position == p) return static_cast<int>(i);
  return -1;
}

CellCode EnvState::cell(Pos p) const {
  if (!in_bounds(p)) return CellCode::Wall;
  if (p == agent) return CellCode::Agent;
  if (int o = object_at(p); o >= 0) return object_code(objects[o].texture, objects[o].shape);
  return terrain_at(p);
}

bool EnvState::inside_room(Pos p) const {
  return p.row > room_origin.row && p.col > room_origin.col && p.row < room_origin.row + room_size - 1 &&
         p.col < room_origin.col + room_size - 1;
}

double goal_reward(int step_count, int max_steps) {
  const double m = static_cast<double>(max_steps);
  return std::min(10.0 + (m - static_cast<double>(step_count)) / m * 10.0, 20.0);
}

namespace {

bool walkable_terrain(CellCode c) { return c == CellCode::Free || c == CellCode::AgentStart || c == CellCode::Goal; }

// Objects may only be pushed onto plain floor.
bool push_target_ok(const EnvState& s, Pos p) {
  if (!s.in_bounds(p)) return false;
  const CellCode t = s.terrain_at(p);
  return (t == CellCode::Free || t == CellCode::AgentStart) && s.object_at(p) < 0 && !(p == s.agent);
}

std::size_t index(const EnvState& s, Pos p) { return static_cast<std::size_t>(p.row * s.size + p.col); }

}  // namespace

StepOutcome step_inplace(EnvState& s, Action a) {
  if (s.done) throw Error("step: episode already finished");
  StepOutcome out;
  const Pos target = displaced(s.agent, a);
  if (!s.in_bounds(target) || s.terrain_at(target) == CellCode::Wall) {
    out.info.event = StepEvent::BlockedWall;
  } else if (const int o = s.object_at(target); o >= 0) {
    out.info.object_index = o;
    ObjectInstance& obj = s.objects[static_cast<std::size_t>(o)];
    if (!obj.movable) {
      out.info.event = StepEvent::BlockedImmovable;
      ++s.counters.immovable_interactions;
    } else {
      ++s.counters.movable_interactions;
      const Pos beyond = displaced(target, a);
      if (push_target_ok(s, beyond)) {
        obj.position = beyond;
        obj.moved_ever = true;
        s.agent = target;
        out.info.event = StepEvent::Pushed;
      } else {
        out.info.event = StepEvent::BlockedPush;
      }
    }
  } else if (s.terrain_at(target) == CellCode::Goal) {
    s.agent = target;
    out.info.event = StepEvent::ReachedGoal;
    out.reward = goal_reward(s.step_count, s.max_steps);
    out.done = true;
    s.counters.reached_goal = true;
  } else {
    s.agent = target;
    out.info.event = StepEvent::Moved;
  }

  ++s.step_count;
  if (out.done) s.counters.steps_to_goal = s.step_count;
  if (!out.done && s.step_count >= s.max_steps) {
    out.done = true;
    out.info.truncated = true;
  }
  s.done = out.done;
  s.facing = a;
  s.last_blocked = out.info.event == StepEvent::BlockedWall || out.info.event == StepEvent::BlockedImmovable ||
                   out.info.event == StepEvent::BlockedPush;
  return out;
}

Transition step(const EnvState& s, Action a) {
  Transition t;
  t.state = s;
  const StepOutcome o = step_inplace(t.state, a);
  t.reward = o.reward;
  t.done = o.done;
  t.info = o.info;
  return t;
}

CellCode local_view(const EnvState& s) { return s.cell(displaced(s.agent, s.facing)); }

bool reachable_with_movables_passable(const EnvState& s) {
  std::vector<char> seen(static_cast<std::size_t>(s.size * s.size), 0);
  std::deque<Pos> queue{s.agent};
  seen[index(s, s.agent)] = 1;
  while (!queue.empty()) {
    const Pos p = queue.front();
    queue.pop_front();
    if (p == s.goal) return true;
    for (int a = 0; a < kNumActions; ++a) {
      const Pos q = displaced(p, static_cast<Action>(a));
      if (!s.in_bounds(q) || seen[index(s, q)] || !walkable_terrain(s.terrain_at(q))) continue;
      if (const int o = s.object_at(q); o >= 0 && !s.objects[static_cast<std::size_t>(o)].movable) continue;
      seen[index(s, q)] = 1;
      queue.push_back(q);
    }
  }
  return false;
}

bool solvable_by_door_pushes(const EnvState& s, std::size_t state_cap) {
  std::vector<std::size_t> doors;
  std::vector<char> blocked(static_cast<std::size_t>(s.size * s.size), 0);
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    if (s.objects[i].door && s.objects[i].movable)
      doors.push_back(i);
    else
      blocked[index(s, s.objects[i].position)] = 1;
  }
  if (doors.size() > 5) throw Error("solvable_by_door_pushes: at most 5 door objects supported");

  // State key: 10 bits per cell index, agent first then doors.
  using Key = std::uint64_t;
  auto encode = [&](Pos agent, const std::vector<Pos>& d) {
    Key k = index(s, agent);
    for (const Pos& p : d) k = (k << 10) | index(s, p);
    return k;
  };
  struct Node {
    Pos agent;
    std::vector<Pos> doors;
  };
  Node start{s.agent, {}};
  for (std::size_t i : doors) start.doors.push_back(s.objects[i].position);

  std::unordered_set<Key> seen{encode(start.agent, start.doors)};
  std::deque<Node> queue{start};
  auto free_floor = [&](Pos p, const std::vector<Pos>& d) {
    if (!s.in_bounds(p) || blocked[index(s, p)]) return false;
    const CellCode t = s.terrain_at(p);
    if (t != CellCode::Free && t != CellCode::AgentStart) return false;
    return std::find(d.begin(), d.end(), p) == d.end();
  };
  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    for (int a = 0; a < kNumActions; ++a) {
      const Pos q = displaced(node.agent, static_cast<Action>(a));
      if (!s.in_bounds(q) || blocked[index(s, q)] || !walkable_terrain(s.terrain_at(q))) continue;
      Node next = node;
      auto hit = std::find(next.doors.begin(), next.doors.end(), q);
      if (hit != next.doors.end()) {
        const Pos beyond = displaced(q, static_cast<Action>(a));
        if (!free_floor(beyond, next.doors)) continue;
        *hit = beyond;
      } else if (q == s.goal) {
        return true;
      }
      next.agent = q;
      if (seen.insert(encode(next.agent, next.doors)).second) {
        if (seen.size() > state_cap) return false;
        queue.push_back(std::move(next));
      }
    }
  }
  return false;
}

namespace {

std::vector<std::pair<Texture, Shape>> movable_types(CausalLaw law) {
  std::vector<std::pair<Texture, Shape>> out;
  for (Texture t : {Texture::Rough, Texture::Smooth})
    for (Shape sh : {Shape::Debris, Shape::Column}) {
      if (!law_uses_shape(law) && sh == Shape::Column) continue;
      if (law_movability(law, t, sh)) out.emplace_back(t, sh);
    }
  return out;
}

EnvState try_layout(const EnvConfig& cfg, Rng& rng) {
  EnvState s;
  s.size = cfg.grid_size;
  s.max_steps = cfg.max_steps;
  s.room_size = cfg.room_size;
  s.terrain.assign(static_cast<std::size_t>(s.size * s.size), CellCode::Free);
  s.facing = Action::Forward;

  const int r = cfg.room_size;
  if (cfg.room_randomized) {
    const int span = cfg.grid_size - r - 1;  // origins 1 .. grid - r - 1
    s.room_origin = {1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(span))),
                     1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(span)))};
  } else {
    s.room_origin = {(cfg.grid_size - r) / 2, (cfg.grid_size - r) / 2};
  }
  const Pos o = s.room_origin;
  std::vector<std::pair<Pos, Pos>> door_slots;  // wall cell, outside approach cell
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const bool edge = i == 0 || j == 0 || i == r - 1 || j == r - 1;
      if (!edge) continue;
      const Pos p{o.row + i, o.col + j};
      s.terrain[index(s, p)] = CellCode::Wall;
      const bool corner = (i == 0 || i == r - 1) && (j == 0 || j == r - 1);
      if (corner) continue;
      Pos outside = p;
      if (i == 0) outside.row -= 1;
      else if (i == r - 1) outside.row += 1;
      else if (j == 0) outside.col -= 1;
      else outside.col += 1;
      if (s.in_bounds(outside)) door_slots.emplace_back(p, outside);
    }
  if (static_cast<int>(door_slots.size()) < cfg.n_door_objects) throw Error("generate_layout: room too small for the door count");

  const auto door_types = movable_types(cfg.law);
  std::vector<char> reserved(static_cast<std::size_t>(s.size * s.size), 0);
  for (int k = 0; k < cfg.n_door_objects; ++k) {
    const std::size_t pick = uniform_index(rng, door_slots.size());
    const auto [wall, approach] = door_slots[pick];
    door_slots.erase(door_slots.begin() + static_cast<std::ptrdiff_t>(pick));
    s.terrain[index(s, wall)] = CellCode::Free;
    const auto [tex, shp] = door_types[uniform_index(rng, door_types.size())];
    s.objects.push_back({wall, tex, shp, true, false, true});
    reserved[index(s, approach)] = 1;
  }

  std::vector<Pos> interior, outside;
  for (int i = 0; i < s.size; ++i)
    for (int j = 0; j < s.size; ++j) {
      const Pos p{i, j};
      if (s.inside_room(p)) interior.push_back(p);
      else if (s.terrain_at(p) == CellCode::Free && s.object_at(p) < 0) outside.push_back(p);
    }
  s.goal = interior[uniform_index(rng, interior.size())];
  s.terrain[index(s, s.goal)] = CellCode::Goal;

  const std::size_t start_pick = uniform_index(rng, outside.size());
  s.start = s.agent = outside[start_pick];
  s.terrain[index(s, s.start)] = CellCode::AgentStart;
  outside.erase(outside.begin() + static_cast<std::ptrdiff_t>(start_pick));
  std::erase_if(outside, [&](Pos p) { return reserved[index(s, p)] != 0; });

  const int scattered = cfg.n_objects - cfg.n_door_objects;
  if (static_cast<int>(outside.size()) < scattered) throw Error("generate_layout: not enough free cells for the objects");
  for (int k = 0; k < scattered; ++k) {
    const std::size_t pick = uniform_index(rng, outside.size());
    const Pos p = outside[pick];
    outside.erase(outside.begin() + static_cast<std::ptrdiff_t>(pick));
    const Texture tex = bernoulli(rng, 0.5) ? Texture::Smooth : Texture::Rough;
    Shape shp = Shape::Debris;
    if (law_uses_shape(cfg.law)) shp = bernoulli(rng, 0.5) ? Shape::Debris : Shape::Column;
    s.objects.push_back({p, tex, shp, law_movability(cfg.law, tex, shp), false, false});
  }
  return s;
}

}  // namespace

EnvState generate_layout(const EnvConfig& cfg, Rng& rng) {
  cfg.validate();
  for (int attempt = 0; attempt < cfg.max_layout_retries; ++attempt) {
    EnvState s = try_layout(cfg, rng);
    if (reachable_with_movables_passable(s) && solvable_by_door_pushes(s)) return s;
  }
  throw Error(fmt::format("generate_layout: no solvable layout after {} attempts", cfg.max_layout_retries));
}

std::string render(const EnvState& s) {
  std::string out;
  out.reserve(static_cast<std::size_t>(s.size * (s.size + 1)));
  for (int i = 0; i < s.size; ++i) {
    for (int j = 0; j < s.size; ++j) {
      switch (s.cell({i, j})) {
        case CellCode::Wall: out += '#'; break;
        case CellCode::Free: out += '.'; break;
        case CellCode::RoughDebris: out += 'r'; break;
        case CellCode::RoughColumn: out += 'R'; break;
        case CellCode::SmoothDebris: out += 's'; break;
        case CellCode::SmoothColumn: out += 'S'; break;
        case CellCode::AgentStart: out += 'A'; break;
        case CellCode::Goal: out += 'G'; break;
        case CellCode::Agent: out += '@'; break;
      }
    }
    out += '\n';
  }
  return out;
}

EnvState parse_layout(std::string_view text, CausalLaw law, int max_steps) {
  std::vector<std::string_view> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) rows.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (rows.empty()) throw Error("parse_layout: empty map");
  EnvState s;
  s.size = static_cast<int>(rows.size());
  s.max_steps = max_steps;
  s.terrain.assign(static_cast<std::size_t>(s.size * s.size), CellCode::Free);
  bool have_agent = false, have_goal = false, have_start = false;
  for (int i = 0; i < s.size; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != s.size) throw Error("parse_layout: map must be square");
    for (int j = 0; j < s.size; ++j) {
      const Pos p{i, j};
      auto add = [&](Texture t, Shape sh) { s.objects.push_back({p, t, sh, law_movability(law, t, sh), false, false}); };
      switch (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
        case '#': s.terrain[index(s, p)] = CellCode::Wall; break;
        case '.': break;
        case 'r': add(Texture::Rough, Shape::Debris); break;
        case 'R': add(Texture::Rough, Shape::Column); break;
        case 's': add(Texture::Smooth, Shape::Debris); break;
        case 'S': add(Texture::Smooth, Shape::Column); break;
        case 'A':
          s.terrain[index(s, p)] = CellCode::AgentStart;
          s.start = p;
          have_start = true;
          break;
        case 'G':
          s.terrain[index(s, p)] = CellCode::Goal;
          s.goal = p;
          have_goal = true;
          break;
        case '@':
          s.agent = p;
          have_agent = true;
          break;
        default: throw Error(fmt::format("parse_layout: unknown cell character at ({}, {})", i, j));
      }
    }
  }
  if (!have_agent || !have_goal) throw Error("parse_layout: map needs one '@' and one 'G'");
  if (!have_start) {
    s.start = s.agent;
    s.terrain[index(s, s.agent)] = CellCode::AgentStart;
  }
  s.room_origin = {0, 0};
  s.room_size = s.size;
  return s;
}

}  // namespace crl
