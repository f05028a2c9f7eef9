#include "mborders/engine.hpp"

#include <algorithm>
#include <cmath>

namespace mborders {

namespace {

struct Descent {
  int cls = -1;
  double probability = 1.0;
};

// Local class probabilities of a partition node at x.
std::vector<double> solve_local(const TrainedNode& node,
                                const std::vector<double>& x,
                                BatchCounters& counters) {
  std::vector<double> responses(node.partition_models.size());
  for (std::size_t i = 0; i < node.partition_models.size(); ++i) {
    responses[i] = node.partition_models[i].evaluate(x);
    ++counters.binary_evaluations;
  }
  return solve_probabilities(node.coding, responses).p;
}

std::size_t argmax_lowest(const std::vector<double>& p) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < p.size(); ++j)
    if (p[j] > p[best]) best = j;
  return best;
}

Descent descend(const TrainedNode& node, const std::vector<double>& x,
                BatchCounters& counters) {
  switch (node.kind) {
    case NodeKind::Leaf:
      return {node.leaf_class, 1.0};
    case NodeKind::TwoClass: {
      const double r = node.model.evaluate(x);
      ++counters.binary_evaluations;
      // Ties at r = 0 go to side 2 (child 1).
      const std::size_t winner = r >= 0.0 ? 1 : 0;
      const double q = (1.0 + std::abs(r)) / 2.0;
      const Descent sub = descend(*node.children[winner], x, counters);
      return {sub.cls, q * sub.probability};
    }
    case NodeKind::Partitioned: {
      const std::vector<double> p = solve_local(node, x, counters);
      const std::size_t winner = argmax_lowest(p);
      const Descent sub = descend(*node.children[winner], x, counters);
      return {sub.cls, p[winner] * sub.probability};
    }
  }
  return {};
}

}  // namespace

bool is_single_level(const TrainedMultiModel& model) {
  if (!model.root || model.root->kind != NodeKind::Partitioned) return false;
  return std::all_of(model.root->children.begin(), model.root->children.end(),
                     [](const auto& c) { return c->kind == NodeKind::Leaf; });
}

ClassificationResult classify_point(const TrainedMultiModel& model,
                                    const std::vector<double>& x,
                                    BatchCounters& counters) {
  if (model.dim > 0 && x.size() != model.dim)
    throw Error(ErrorCode::DimensionMismatch,
                "point has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(model.dim));

  ClassificationResult result;
  if (is_single_level(model)) {
    const std::vector<double> p = solve_local(*model.root, x, counters);
    const std::size_t winner = argmax_lowest(p);
    result.predicted_class = model.root->children[winner]->leaf_class;
    result.winner_probability = p[winner];
    result.has_distribution = true;
    result.distribution.assign(static_cast<std::size_t>(model.n_classes), 0.0);
    for (std::size_t j = 0; j < p.size(); ++j)
      result.distribution[static_cast<std::size_t>(
          model.root->children[j]->leaf_class)] = p[j];
    return result;
  }

  const Descent d = descend(*model.root, x, counters);
  result.predicted_class = d.cls;
  result.winner_probability = d.probability;
  return result;
}

ClassificationResult classify_point(const TrainedMultiModel& model,
                                    const std::vector<double>& x) {
  BatchCounters counters;
  return classify_point(model, x, counters);
}

std::vector<ClassificationResult> classify_batch(
    const TrainedMultiModel& model, const std::vector<std::vector<double>>& points,
    BatchCounters& counters) {
  std::vector<ClassificationResult> results;
  results.reserve(points.size());
  for (const auto& x : points) results.push_back(classify_point(model, x, counters));
  return results;
}

}  // namespace mborders
