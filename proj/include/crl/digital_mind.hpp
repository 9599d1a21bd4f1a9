#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crl/gridworld.hpp"
#include "crl/notears.hpp"
#include "crl/scenarios.hpp"

namespace crl {

struct ObjectType {
  Texture texture = Texture::Rough;
  Shape shape = Shape::Debris;
  auto operator<=>(const ObjectType&) const = default;
};

/// rough-debris, rough-column, smooth-debris, smooth-column: the causal observation order.
inline constexpr std::array<ObjectType, 4> kObjectTypes{{
    {Texture::Rough, Shape::Debris},
    {Texture::Rough, Shape::Column},
    {Texture::Smooth, Shape::Debris},
    {Texture::Smooth, Shape::Column},
}};

enum class MovementStatus { Unknown, Moved, NeverMoved };

struct MindEntry {
  int interaction_count = 0;
  int moved_count = 0;
  std::optional<Action> last_action;
  MovementStatus status = MovementStatus::Unknown;
  double causal_probability = 0.5;
  bool operator==(const MindEntry&) const = default;
};

struct InteractionRecord {
  Texture texture = Texture::Rough;
  Shape shape = Shape::Debris;
  bool moved = false;
  bool operator==(const InteractionRecord&) const = default;
};

struct RefreshOptions {
  std::size_t min_interactions = 16;
  double laplace_alpha = 1.0;
};

/// Interaction memory of one robot. The log persists across episodes; per-episode fields
/// (movement status, last action) are cleared by `begin_episode`.
class DigitalMind {
 public:
  void record_interaction(Texture texture, Shape shape, Action action, bool moved);

  /// One row per logged interaction: texture[, shape], moved with rough=0/smooth=1,
  /// column=0/debris=1, immovable=0/moved=1.
  Matrix to_dataset(bool include_shape) const;
  static std::vector<std::string> dataset_labels(bool include_shape);

  /// Learns a DAG from the log, fits CPDs on it and updates every type's probability.
  /// Below `min_interactions` logged rows all probabilities are 0.5. Returns false and
  /// leaves probabilities untouched if the solver throws.
  bool refresh_causal_model(const NotearsConfig& cfg, bool include_shape, const RefreshOptions& opts = {});

  void begin_episode();

  /// P(movable) for a type, including types never touched (model prediction or 0.5).
  double probability(ObjectType type) const;

  const std::map<ObjectType, MindEntry>& entries() const { return entries_; }
  const std::vector<InteractionRecord>& log() const { return log_; }
  std::size_t total_interactions() const { return log_.size(); }
  const std::optional<DirectedGraph>& learned_graph() const { return graph_; }

  /// CSV dump: interaction log, blank line, probability table.
  std::string dump_csv() const;
  /// Restores the probability table from a dump (the log is restored too).
  static DigitalMind from_csv(std::string_view text);

 private:
  std::map<ObjectType, MindEntry> entries_;
  std::vector<InteractionRecord> log_;
  std::array<double, 4> predicted_{0.5, 0.5, 0.5, 0.5};
  std::optional<DirectedGraph> graph_;
};

std::size_t type_slot(ObjectType t);

}  // namespace crl
