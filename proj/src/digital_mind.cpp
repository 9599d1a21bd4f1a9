#include "crl/digital_mind.hpp"

#include <fmt/format.h>

#include "crl/bayes.hpp"
#include "crl/csv.hpp"

namespace crl {

std::size_t type_slot(ObjectType t) {
  return static_cast<std::size_t>(t.texture == Texture::Smooth) * 2 + static_cast<std::size_t>(t.shape == Shape::Column);
}

void DigitalMind::record_interaction(Texture texture, Shape shape, Action action, bool moved) {
  MindEntry& e = entries_[{texture, shape}];
  ++e.interaction_count;
  if (moved) ++e.moved_count;
  e.last_action = action;
  if (moved)
    e.status = MovementStatus::Moved;
  else if (e.status != MovementStatus::Moved)
    e.status = MovementStatus::NeverMoved;
  e.causal_probability = predicted_[type_slot({texture, shape})];
  log_.push_back({texture, shape, moved});
}

std::vector<std::string> DigitalMind::dataset_labels(bool include_shape) {
  if (include_shape) return {"texture", "shape", std::string(kMovability)};
  return {"texture", std::string(kMovability)};
}

Matrix DigitalMind::to_dataset(bool include_shape) const {
  const Eigen::Index d = include_shape ? 3 : 2;
  Matrix x(static_cast<Eigen::Index>(log_.size()), d);
  for (std::size_t r = 0; r < log_.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    x(row, 0) = static_cast<int>(log_[r].texture);
    if (include_shape) x(row, 1) = static_cast<int>(log_[r].shape);
    x(row, d - 1) = log_[r].moved ? 1.0 : 0.0;
  }
  return x;
}

bool DigitalMind::refresh_causal_model(const NotearsConfig& cfg, bool include_shape, const RefreshOptions& opts) {
  std::array<double, 4> next{0.5, 0.5, 0.5, 0.5};
  std::optional<DirectedGraph> graph;
  if (log_.size() >= opts.min_interactions) {
    try {
      const Matrix x = to_dataset(include_shape);
      const NotearsResult fit = fit_notears(x, cfg, dataset_labels(include_shape));
      const BayesNet net = fit_cpds(fit.graph, x, opts.laplace_alpha);
      for (ObjectType t : kObjectTypes) {
        Evidence ev{{"texture", static_cast<int>(t.texture)}};
        if (include_shape) ev["shape"] = static_cast<int>(t.shape);
        next[type_slot(t)] = query_movability(net, ev);
      }
      graph = fit.graph;
    } catch (const Error&) {
      return false;
    }
  }
  predicted_ = next;
  graph_ = std::move(graph);
  for (auto& [type, entry] : entries_) entry.causal_probability = predicted_[type_slot(type)];
  return true;
}

void DigitalMind::begin_episode() {
  for (auto& [type, entry] : entries_) {
    entry.status = MovementStatus::Unknown;
    entry.last_action.reset();
  }
}

double DigitalMind::probability(ObjectType type) const { return predicted_[type_slot(type)]; }

std::string DigitalMind::dump_csv() const {
  std::string out = "texture,shape,moved\n";
  for (const auto& r : log_)
    out += fmt::format("{},{},{}\n", static_cast<int>(r.texture), static_cast<int>(r.shape), r.moved ? 1 : 0);
  out += "\ntexture,shape,interactions,moved,probability\n";
  for (ObjectType t : kObjectTypes) {
    auto it = entries_.find(t);
    const int n = it == entries_.end() ? 0 : it->second.interaction_count;
    const int m = it == entries_.end() ? 0 : it->second.moved_count;
    out += fmt::format("{},{},{},{},{}\n", static_cast<int>(t.texture), static_cast<int>(t.shape), n, m,
                       csv::format_double(probability(t)));
  }
  return out;
}

DigitalMind DigitalMind::from_csv(std::string_view text) {
  DigitalMind mind;
  const auto ls = csv::lines(text);
  std::size_t i = 0;
  if (ls.empty() || ls[0] != "texture,shape,moved") throw Error("mind csv: missing log header");
  for (i = 1; i < ls.size() && ls[i] != "texture,shape,interactions,moved,probability"; ++i) {
    const auto f = csv::split(ls[i]);
    if (f.size() != 3) throw Error("mind csv: bad log row");
    const auto tex = static_cast<Texture>(csv::to_int(f[0]));
    const auto shp = static_cast<Shape>(csv::to_int(f[1]));
    const bool moved = csv::to_int(f[2]) != 0;
    MindEntry& e = mind.entries_[{tex, shp}];
    ++e.interaction_count;
    if (moved) ++e.moved_count;
    e.status = moved ? MovementStatus::Moved : (e.status == MovementStatus::Moved ? e.status : MovementStatus::NeverMoved);
    mind.log_.push_back({tex, shp, moved});
  }
  for (++i; i < ls.size(); ++i) {
    const auto f = csv::split(ls[i]);
    if (f.size() != 5) throw Error("mind csv: bad probability row");
    const ObjectType t{static_cast<Texture>(csv::to_int(f[0])), static_cast<Shape>(csv::to_int(f[1]))};
    mind.predicted_[type_slot(t)] = csv::to_double(f[4]);
  }
  for (auto& [type, entry] : mind.entries_) entry.causal_probability = mind.predicted_[type_slot(type)];
  return mind;
}

}  // namespace crl
