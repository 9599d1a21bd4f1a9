#include <gtest/gtest.h>

#include "crl/digital_mind.hpp"

using namespace crl;
using enum Texture;
using enum Shape;

TEST(DigitalMind, RecordInteraction) {
  DigitalMind m;
  m.record_interaction(Smooth, Debris, Action::Forward, true);
  const auto& e = m.entries().at({Smooth, Debris});
  EXPECT_EQ(e.interaction_count, 1);
  EXPECT_EQ(e.moved_count, 1);
  EXPECT_EQ(e.status, MovementStatus::Moved);
  EXPECT_EQ(e.last_action, Action::Forward);
  m.record_interaction(Smooth, Debris, Action::Left, false);
  EXPECT_EQ(m.entries().at({Smooth, Debris}).interaction_count, 2);
  EXPECT_EQ(m.entries().at({Smooth, Debris}).moved_count, 1);
  EXPECT_EQ(m.entries().at({Smooth, Debris}).status, MovementStatus::Moved);
  m.record_interaction(Rough, Column, Action::Right, false);
  EXPECT_EQ(m.entries().size(), 2u);
  EXPECT_EQ(m.entries().at({Rough, Column}).status, MovementStatus::NeverMoved);
  EXPECT_EQ(m.entries().at({Rough, Column}).interaction_count, 1);
  EXPECT_EQ(m.total_interactions(), 3u);
}

TEST(DigitalMind, BeginEpisodeKeepsLog) {
  DigitalMind m;
  m.record_interaction(Smooth, Debris, Action::Forward, true);
  m.begin_episode();
  EXPECT_EQ(m.entries().at({Smooth, Debris}).status, MovementStatus::Unknown);
  EXPECT_FALSE(m.entries().at({Smooth, Debris}).last_action.has_value());
  EXPECT_EQ(m.total_interactions(), 1u);
  EXPECT_EQ(m.entries().at({Smooth, Debris}).interaction_count, 1);
}

TEST(DigitalMind, Dataset) {
  DigitalMind m;
  EXPECT_EQ(m.to_dataset(false).rows(), 0);
  EXPECT_EQ(m.to_dataset(true).cols(), 3);
  m.record_interaction(Smooth, Debris, Action::Forward, true);
  m.record_interaction(Rough, Column, Action::Forward, false);
  m.record_interaction(Rough, Debris, Action::Forward, false);
  const auto x = m.to_dataset(false);
  ASSERT_EQ(x.rows(), 3);
  ASSERT_EQ(x.cols(), 2);
  EXPECT_EQ(DigitalMind::dataset_labels(false), (std::vector<std::string>{"texture", "movability"}));
  const auto y = m.to_dataset(true);
  // decode and compare with the log
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const auto& rec = m.log()[static_cast<std::size_t>(r)];
    EXPECT_EQ(y(r, 0) == 1.0 ? Smooth : Rough, rec.texture);
    EXPECT_EQ(y(r, 1) == 1.0 ? Debris : Column, rec.shape);
    EXPECT_EQ(y(r, 2) == 1.0, rec.moved);
  }
}

TEST(DigitalMind, EmptyAndGatedMindsStayAtHalf) {
  DigitalMind m;
  EXPECT_TRUE(m.refresh_causal_model({}, false));
  for (auto t : kObjectTypes) EXPECT_EQ(m.probability(t), 0.5);
  for (int i = 0; i < 5; ++i) m.record_interaction(Smooth, Debris, Action::Forward, true);
  m.refresh_causal_model({}, false);
  for (auto t : kObjectTypes) EXPECT_EQ(m.probability(t), 0.5);
  EXPECT_EQ(m.entries().at({Smooth, Debris}).causal_probability, 0.5);
}

TEST(DigitalMind, LearnsTextureLaw) {
  DigitalMind m;
  for (int i = 0; i < 10; ++i) {
    m.record_interaction(Smooth, Debris, Action::Forward, true);
    m.record_interaction(Rough, Debris, Action::Forward, false);
  }
  ASSERT_TRUE(m.refresh_causal_model({}, false));
  EXPECT_GT(m.probability({Smooth, Debris}), 0.9);
  EXPECT_GT(m.probability({Smooth, Column}), 0.9);
  EXPECT_LT(m.probability({Rough, Debris}), 0.1);
  EXPECT_LT(m.probability({Rough, Column}), 0.1);
  EXPECT_EQ(m.entries().at({Smooth, Debris}).causal_probability, m.probability({Smooth, Debris}));
  ASSERT_TRUE(m.learned_graph().has_value());
  EXPECT_EQ(m.learned_graph()->edge_count(), 1u);
}

TEST(DigitalMind, RefreshIsIdempotent) {
  DigitalMind m;
  for (int i = 0; i < 12; ++i) {
    m.record_interaction(i % 3 ? Smooth : Rough, i % 2 ? Debris : Column, Action::Right, i % 3 != 0);
  }
  m.refresh_causal_model({}, true);
  std::array<double, 4> first{};
  for (auto t : kObjectTypes) first[type_slot(t)] = m.probability(t);
  m.refresh_causal_model({}, true);
  for (auto t : kObjectTypes) EXPECT_EQ(m.probability(t), first[type_slot(t)]);
}

TEST(DigitalMind, MonotoneEvidence) {
  // noiseless texture law: each extra consistent pair can only sharpen the estimates
  DigitalMind m;
  double last_smooth = 0.0, last_rough = 1.0;
  for (int pairs = 1; pairs <= 40; ++pairs) {
    m.record_interaction(Smooth, Debris, Action::Forward, true);
    m.record_interaction(Rough, Debris, Action::Forward, false);
    m.refresh_causal_model({}, false);
    const double ps = m.probability({Smooth, Debris}), pr = m.probability({Rough, Debris});
    EXPECT_GE(ps, last_smooth - 1e-12);
    EXPECT_LE(pr, last_rough + 1e-12);
    EXPECT_GE(ps, 0.0);
    EXPECT_LE(ps, 1.0);
    last_smooth = ps;
    last_rough = pr;
  }
}

TEST(DigitalMind, CsvRoundTrip) {
  DigitalMind m;
  for (int i = 0; i < 20; ++i) m.record_interaction(i % 2 ? Smooth : Rough, Debris, Action::Backward, i % 2 == 1);
  m.refresh_causal_model({}, false);
  const auto text = m.dump_csv();
  const auto back = DigitalMind::from_csv(text);
  EXPECT_EQ(back.log(), m.log());
  for (auto t : kObjectTypes) EXPECT_EQ(back.probability(t), m.probability(t));
  EXPECT_EQ(back.dump_csv(), text);
}

TEST(DigitalMind, TypeSlots) {
  for (std::size_t i = 0; i < kObjectTypes.size(); ++i) EXPECT_EQ(type_slot(kObjectTypes[i]), i);
}
