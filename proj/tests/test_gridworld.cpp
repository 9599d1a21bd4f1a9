#include <gtest/gtest.h>

#include <set>

#include "crl/gridworld.hpp"
#include "oracles.hpp"

using namespace crl;
using namespace crl::testing;

namespace {

void expect_transition(const EnvState& s0, Action a, const Expected& e) {
  const auto t = step(s0, a);
  EXPECT_EQ(t.state.agent, e.agent);
  const auto& mov = s0.objects[0].movable ? t.state.objects[0] : t.state.objects[1];
  EXPECT_EQ(mov.position, e.movable);
  EXPECT_EQ(t.info.event, e.event);
  EXPECT_NEAR(t.reward, e.reward, 1e-12);
  EXPECT_EQ(t.done, e.done);
  EXPECT_EQ(t.state.counters.movable_interactions, s0.counters.movable_interactions + e.movable_hits);
  EXPECT_EQ(t.state.counters.immovable_interactions, s0.counters.immovable_interactions + e.immovable_hits);
  EXPECT_EQ(t.state.facing, a);
  EXPECT_EQ(t.state.step_count, s0.step_count + 1);
  EXPECT_EQ(t.state.last_blocked, e.event == StepEvent::BlockedWall || e.event == StepEvent::BlockedImmovable ||
                                      e.event == StepEvent::BlockedPush);
}

}  // namespace

TEST(Gridworld, TestMapParses) {
  const auto s = parse_layout(std::string(kMap5.substr(0, 6)) + "#@..#\n" + std::string(kMap5.substr(12)), CausalLaw::TextureOnly, 800);
  ASSERT_EQ(s.objects.size(), 1u);
  EXPECT_FALSE(s.objects[0].movable);
  EXPECT_EQ(parse_layout(place({1, 1}, {1, 2}), CausalLaw::TextureOnly, 800).objects.size(), 2u);
  EXPECT_EQ(s.cell({1, 1}), CellCode::Agent);
  EXPECT_EQ(s.terrain_at({1, 1}), CellCode::AgentStart);
  EXPECT_EQ(s.cell({3, 3}), CellCode::Goal);
  EXPECT_EQ(s.cell({-1, 0}), CellCode::Wall);
}

TEST(Reward, Formula) {
  EXPECT_NEAR(goal_reward(400, 800), 15.0, 1e-12);
  EXPECT_NEAR(goal_reward(0, 800), 20.0, 1e-12);
  EXPECT_NEAR(goal_reward(800, 800), 10.0, 1e-12);
  EXPECT_NEAR(goal_reward(100, 200), 15.0, 1e-12);
}

TEST(Gridworld, HandEnumeratedTransitions) {
  const auto table = hand_table();
  for (const auto& r : table) {
    SCOPED_TRACE(place(r.agent, r.movable));
    expect_transition(parse_layout(place(r.agent, r.movable), CausalLaw::TextureOnly, 800), r.a, r.e);
  }
}

TEST(Gridworld, FullTransitionTableMatchesOracle) {
  const std::vector<Pos> floor = {{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 3}, {3, 1}, {3, 2}};
  int checked = 0;
  for (Pos agent : floor)
    for (Pos mov : floor) {
      if (agent == mov) continue;
      for (int step_count : {0, 400, 799}) {
        auto s = parse_layout(place(agent, mov), CausalLaw::TextureOnly, 800);
        s.step_count = step_count;
        for (int a = 0; a < kNumActions; ++a) {
          expect_transition(s, static_cast<Action>(a), oracle(agent, mov, static_cast<Action>(a), step_count, 800));
          ++checked;
        }
      }
    }
  EXPECT_EQ(checked, 7 * 6 * 3 * 4);
}

TEST(Gridworld, TruncationAndFinishedEpisodes) {
  auto s = parse_layout(place({1, 1}, {1, 2}), CausalLaw::TextureOnly, 2);
  auto o = step_inplace(s, Action::Backward);
  EXPECT_FALSE(o.done);
  o = step_inplace(s, Action::Forward);
  EXPECT_TRUE(o.done);
  EXPECT_TRUE(o.info.truncated);
  EXPECT_EQ(o.reward, 0.0);
  EXPECT_FALSE(s.counters.reached_goal);
  EXPECT_THROW(step_inplace(s, Action::Left), Error);

  auto g = parse_layout(place({2, 3}, {1, 2}), CausalLaw::TextureOnly, 800);
  step_inplace(g, Action::Backward);
  EXPECT_TRUE(g.counters.reached_goal);
  EXPECT_EQ(g.counters.steps_to_goal, 1);
  EXPECT_TRUE(g.done);
}

TEST(Gridworld, StepIsPure) {
  const auto s = parse_layout(place({1, 1}, {1, 2}), CausalLaw::TextureOnly, 800);
  const auto copy = s;
  for (int a = 0; a < kNumActions; ++a) {
    const auto t1 = step(s, static_cast<Action>(a));
    const auto t2 = step(s, static_cast<Action>(a));
    EXPECT_EQ(t1.state, t2.state);
    EXPECT_EQ(t1.reward, t2.reward);
    EXPECT_EQ(s, copy);
  }
}

TEST(Gridworld, LocalView) {
  auto s = parse_layout(place({1, 1}, {1, 2}), CausalLaw::TextureOnly, 800);
  s.facing = Action::Forward;
  EXPECT_EQ(local_view(s), CellCode::Wall);
  s.facing = Action::Right;
  EXPECT_EQ(local_view(s), CellCode::SmoothDebris);
  s.facing = Action::Backward;
  EXPECT_EQ(local_view(s), CellCode::Free);
  auto edge = parse_layout("@..\n...\n..G\n", CausalLaw::TextureOnly, 10);
  edge.facing = Action::Left;
  EXPECT_EQ(local_view(edge), CellCode::Wall);
  edge.facing = Action::Right;
  EXPECT_EQ(local_view(edge), CellCode::Free);
}

TEST(Gridworld, ConfigValidation) {
  EnvConfig c;
  EXPECT_NO_THROW(c.validate());
  c.room_size = 19;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.n_door_objects = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.n_objects = 1;
  EXPECT_THROW(c.validate(), Error);
}

namespace {

void check_layout(const EnvState& s, const EnvConfig& cfg) {
  int goals = 0;
  for (int i = 0; i < s.size; ++i)
    for (int j = 0; j < s.size; ++j)
      if (s.terrain_at({i, j}) == CellCode::Goal) ++goals;
  ASSERT_EQ(goals, 1);
  EXPECT_TRUE(s.inside_room(s.goal));
  EXPECT_FALSE(s.inside_room(s.agent));
  EXPECT_EQ(s.agent, s.start);
  EXPECT_EQ(static_cast<int>(s.objects.size()), cfg.n_objects);
  EXPECT_TRUE(reachable_with_movables_passable(s));
  int doors = 0;
  std::set<std::pair<int, int>> cells;
  for (const auto& o : s.objects) {
    EXPECT_EQ(o.movable, law_movability(cfg.law, o.texture, o.shape));
    EXPECT_TRUE(cells.insert({o.position.row, o.position.col}).second);
    EXPECT_FALSE(o.position == s.agent);
    EXPECT_NE(s.terrain_at(o.position), CellCode::Wall);
    EXPECT_NE(s.terrain_at(o.position), CellCode::Goal);
    if (o.door) {
      ++doors;
      EXPECT_TRUE(o.movable);
    }
  }
  EXPECT_EQ(doors, cfg.n_door_objects);
  // Room boundary: every cell is a wall or a door object.
  const Pos r = s.room_origin;
  for (int i = 0; i < s.room_size; ++i)
    for (int j = 0; j < s.room_size; ++j) {
      if (i != 0 && j != 0 && i != s.room_size - 1 && j != s.room_size - 1) continue;
      const Pos p{r.row + i, r.col + j};
      const int o = s.object_at(p);
      EXPECT_TRUE(s.terrain_at(p) == CellCode::Wall || (o >= 0 && s.objects[static_cast<std::size_t>(o)].door));
    }
  if (!cfg.room_randomized) {
    EXPECT_EQ(r.row, (cfg.grid_size - cfg.room_size) / 2);
    EXPECT_EQ(r.col, (cfg.grid_size - cfg.room_size) / 2);
  } else {
    EXPECT_GE(r.row, 1);
    EXPECT_LE(r.row + cfg.room_size, cfg.grid_size - 1);
  }
}

}  // namespace

TEST(Layout, DefaultConfigOverManySeeds) {
  EnvConfig cfg;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    check_layout(generate_layout(cfg, rng), cfg);
  }
}

TEST(Layout, OtherConfigurations) {
  for (auto law : {CausalLaw::TextureOnly, CausalLaw::TextureOnlyWithShapePresent, CausalLaw::TextureAndShape})
    for (int objects : {6, 12, 18}) {
      EnvConfig cfg;
      cfg.law = law;
      cfg.n_objects = objects;
      cfg.room_randomized = true;
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        check_layout(generate_layout(cfg, rng), cfg);
      }
    }
  EnvConfig desk;
  desk.grid_size = 10;
  desk.room_size = 4;
  desk.n_objects = 6;
  desk.max_steps = 200;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto s = generate_layout(desk, rng);
    check_layout(s, desk);
    EXPECT_TRUE(solvable_by_door_pushes(s));
  }
}

TEST(Layout, TextureOnlyObjectsAreDebris) {
  EnvConfig cfg;
  Rng rng(4);
  for (const auto& o : generate_layout(cfg, rng).objects) EXPECT_EQ(o.shape, Shape::Debris);
}

TEST(Layout, DeterministicGivenSeed) {
  EnvConfig cfg;
  Rng a(7), b(7);
  EXPECT_EQ(generate_layout(cfg, a), generate_layout(cfg, b));
}

TEST(Layout, RenderRoundTrip) {
  EnvConfig cfg;
  Rng rng(9);
  const auto s = generate_layout(cfg, rng);
  const auto text = render(s);
  const auto back = parse_layout(text, cfg.law, cfg.max_steps);
  EXPECT_EQ(render(back), text);
  EXPECT_EQ(back.agent, s.agent);
  EXPECT_EQ(back.goal, s.goal);
  EXPECT_EQ(back.objects.size(), s.objects.size());
  EXPECT_THROW(parse_layout("ab\ncd\n", cfg.law, 10), Error);
  EXPECT_THROW(parse_layout("..\n..\n", cfg.law, 10), Error);
}

TEST(Gridworld, ConservationFuzz) {
  EnvConfig cfg;
  Rng policy(123);
  for (std::uint64_t ep = 0; ep < 1000; ++ep) {
    Rng rng(ep);
    EnvState s = generate_layout(cfg, rng);
    const auto n_objects = s.objects.size();
    std::vector<Pos> fixed;
    for (const auto& o : s.objects) fixed.push_back(o.position);
    const auto walls = s.terrain;
    int length = 0, events = 0;
    double total_reward = 0;
    while (!s.done) {
      const auto out = step_inplace(s, static_cast<Action>(uniform_index(policy, 4)));
      ++length;
      total_reward += out.reward;
      if (out.reward != 0.0) {
        EXPECT_TRUE(out.done);
        EXPECT_GE(out.reward, 10.0);
        EXPECT_LE(out.reward, 20.0);
      }
      const auto ev = out.info.event;
      if (ev == StepEvent::Pushed || ev == StepEvent::BlockedPush || ev == StepEvent::BlockedImmovable) ++events;
      ASSERT_EQ(s.objects.size(), n_objects);
      std::set<std::pair<int, int>> occupied{{s.agent.row, s.agent.col}};
      for (std::size_t i = 0; i < s.objects.size(); ++i) {
        const auto& o = s.objects[i];
        if (!o.movable) {
          ASSERT_EQ(o.position, fixed[i]);
        }
        ASSERT_TRUE(occupied.insert({o.position.row, o.position.col}).second);
        ASSERT_NE(s.terrain_at(o.position), CellCode::Wall);
      }
      ASSERT_NE(s.terrain_at(s.agent), CellCode::Wall);
      ASSERT_LE(s.step_count, s.max_steps);
    }
    EXPECT_EQ(s.terrain, walls);
    EXPECT_LE(length, cfg.max_steps);
    EXPECT_EQ(s.counters.movable_interactions + s.counters.immovable_interactions, events);
    EXPECT_TRUE(total_reward == 0.0 || (total_reward >= 10.0 && total_reward <= 20.0));
    EXPECT_EQ(s.counters.reached_goal, total_reward > 0.0);
  }
}
