#ifndef MBORDERS_COMPOSER_HPP
#define MBORDERS_COMPOSER_HPP

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mborders/binary_model.hpp"
#include "mborders/coding.hpp"
#include "mborders/control_lang.hpp"
#include "mborders/dataset.hpp"

namespace mborders {

// A control tree with every model spec resolved to a trained discriminator.
// Structure is isomorphic to the training tree.
struct TrainedNode {
  NodeKind kind = NodeKind::Leaf;
  int leaf_class = -1;

  BinaryModel model;  // TwoClass

  std::vector<Partition> partitions;        // Partitioned (local indices)
  std::vector<BinaryModel> partition_models;
  CodingMatrix coding;                      // prebuilt for Partitioned nodes

  std::vector<std::unique_ptr<TrainedNode>> children;
};

struct TrainedMultiModel {
  std::unique_ptr<TrainedNode> root;
  int n_classes = 0;
  std::size_t dim = 0;  // 0 for a bare-leaf model

  std::size_t model_count() const;
};

// Absolute classes at the leaves beneath `node`.
std::set<int> collect_subtree_classes(const ControlNode& node);

// Keeps rows whose label falls in either side, mapping side 1 to y = -1 and
// side 2 to y = +1; row order is preserved.
// Throws Error{EmptySideData}.
std::vector<BinarySample> relabel_for_partition(const Dataset& data,
                                                const std::set<int>& side1,
                                                const std::set<int>& side2);

// One binary model to be trained: where it sits in the tree and which
// absolute classes land on each side of its border.
struct PlanEntry {
  std::string node_path;  // "0", "0.1", "0.p3", ...
  std::string options_text;
  std::set<int> side1;
  std::set<int> side2;
};

// Enumerates the training work of a (training-dialect) tree in depth-first
// order: a two-class node's own model first, then its subtrees; a partition
// node's partitions in file order, then its subtrees.
std::vector<PlanEntry> plan_tree(const ControlNode& tree);

struct TrainConfig {
  std::uint64_t base_seed = 0;  // per-model fallback when -S is absent
  int jobs = 1;                 // concurrent binary-model trainings
};

// Walks a validated training tree, training one binary model per two-class
// node and per partition. Hierarchical nodes see only the data of their own
// subtree classes. Throws Error{ValidationFailed, EmptySideData, UnknownFlag,
// MalformedValue, ...} with the offending node path in the message.
TrainedMultiModel train_tree(const ControlNode& tree, const Dataset& data,
                             const TrainConfig& config = {});

struct ExportResult {
  std::string control_path;
  std::vector<std::string> model_files;  // bare file names, in tree order
};

// Writes one `<base>.<node-path>.mbm` file per binary model plus the
// classification control file `<base>.mbc` referencing them.
// Throws Error{IoError}.
ExportResult export_multi_model(const TrainedMultiModel& model,
                                const std::string& directory,
                                const std::string& base_name);

// Loads a classification control file and every model file it names
// (resolved relative to the control file's directory).
TrainedMultiModel load_multi_model(const std::string& control_path);

}  // namespace mborders

#endif
