#include "mborders/composer.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace mborders {

namespace fs = std::filesystem;

std::size_t TrainedMultiModel::model_count() const {
  std::size_t count = 0;
  if (!root) return 0;
  std::vector<const TrainedNode*> stack{root.get()};
  while (!stack.empty()) {
    const TrainedNode* node = stack.back();
    stack.pop_back();
    if (node->kind == NodeKind::TwoClass) ++count;
    if (node->kind == NodeKind::Partitioned) count += node->partition_models.size();
    for (const auto& c : node->children) stack.push_back(c.get());
  }
  return count;
}

std::set<int> collect_subtree_classes(const ControlNode& node) {
  std::set<int> classes;
  if (node.kind == NodeKind::Leaf) {
    classes.insert(node.leaf_class);
    return classes;
  }
  for (const auto& child : node.children) {
    std::set<int> sub = collect_subtree_classes(*child);
    classes.insert(sub.begin(), sub.end());
  }
  return classes;
}

std::vector<BinarySample> relabel_for_partition(const Dataset& data,
                                                const std::set<int>& side1,
                                                const std::set<int>& side2) {
  std::vector<BinarySample> samples;
  std::size_t n1 = 0, n2 = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int label = data.labels[i];
    if (side1.count(label)) {
      samples.push_back({data.features[i], -1});
      ++n1;
    } else if (side2.count(label)) {
      samples.push_back({data.features[i], +1});
      ++n2;
    }
  }
  if (n1 == 0 || n2 == 0)
    throw Error(ErrorCode::EmptySideData,
                std::string("no training samples on side ") + (n1 == 0 ? "1" : "2"));
  return samples;
}

// ---------------------------------------------------------------------------
// Plan
// ---------------------------------------------------------------------------

namespace {

void plan_walk(const ControlNode& node, const std::string& path,
               std::vector<PlanEntry>& out) {
  switch (node.kind) {
    case NodeKind::Leaf:
      return;
    case NodeKind::TwoClass: {
      PlanEntry entry;
      entry.node_path = path;
      entry.options_text = node.spec.text;
      entry.side1 = collect_subtree_classes(*node.children[0]);
      entry.side2 = collect_subtree_classes(*node.children[1]);
      out.push_back(std::move(entry));
      break;
    }
    case NodeKind::Partitioned: {
      std::vector<std::set<int>> child_classes;
      child_classes.reserve(node.children.size());
      for (const auto& child : node.children)
        child_classes.push_back(collect_subtree_classes(*child));
      for (std::size_t i = 0; i < node.partitions.size(); ++i) {
        const Partition& part = node.partitions[i];
        PlanEntry entry;
        entry.node_path = path + ".p" + std::to_string(i);
        entry.options_text = part.spec.text;
        for (int local : part.side1)
          entry.side1.insert(child_classes[static_cast<std::size_t>(local)].begin(),
                             child_classes[static_cast<std::size_t>(local)].end());
        for (int local : part.side2)
          entry.side2.insert(child_classes[static_cast<std::size_t>(local)].begin(),
                             child_classes[static_cast<std::size_t>(local)].end());
        out.push_back(std::move(entry));
      }
      break;
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i)
    plan_walk(*node.children[i], path + "." + std::to_string(i), out);
}

}  // namespace

std::vector<PlanEntry> plan_tree(const ControlNode& tree) {
  std::vector<PlanEntry> plan;
  plan_walk(tree, "0", plan);
  return plan;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

struct TrainTask {
  BinaryModel* slot = nullptr;
  PlanEntry entry;
  std::uint64_t fallback_seed = 0;
};

// Builds the trained-tree skeleton and the flat task list in plan order.
std::unique_ptr<TrainedNode> build_skeleton(const ControlNode& node,
                                            const std::string& path,
                                            std::vector<TrainTask>& tasks) {
  auto out = std::make_unique<TrainedNode>();
  out->kind = node.kind;
  out->leaf_class = node.leaf_class;
  switch (node.kind) {
    case NodeKind::Leaf:
      return out;
    case NodeKind::TwoClass: {
      TrainTask task;
      task.slot = &out->model;
      task.entry.node_path = path;
      task.entry.options_text = node.spec.text;
      task.entry.side1 = collect_subtree_classes(*node.children[0]);
      task.entry.side2 = collect_subtree_classes(*node.children[1]);
      tasks.push_back(std::move(task));
      break;
    }
    case NodeKind::Partitioned: {
      out->partitions = node.partitions;
      out->partition_models.resize(node.partitions.size());
      out->coding = build_coding_matrix(node.partitions,
                                        static_cast<int>(node.children.size()));
      std::vector<std::set<int>> child_classes;
      for (const auto& child : node.children)
        child_classes.push_back(collect_subtree_classes(*child));
      for (std::size_t i = 0; i < node.partitions.size(); ++i) {
        const Partition& part = node.partitions[i];
        TrainTask task;
        task.slot = &out->partition_models[i];
        task.entry.node_path = path + ".p" + std::to_string(i);
        task.entry.options_text = part.spec.text;
        for (int local : part.side1)
          task.entry.side1.insert(child_classes[static_cast<std::size_t>(local)].begin(),
                                  child_classes[static_cast<std::size_t>(local)].end());
        for (int local : part.side2)
          task.entry.side2.insert(child_classes[static_cast<std::size_t>(local)].begin(),
                                  child_classes[static_cast<std::size_t>(local)].end());
        tasks.push_back(std::move(task));
      }
      break;
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i)
    out->children.push_back(
        build_skeleton(*node.children[i], path + "." + std::to_string(i), tasks));
  return out;
}

void run_task(const TrainTask& task, const Dataset& data) {
  try {
    TrainOptions opts = parse_options(task.entry.options_text);
    if (!opts.seed) opts.seed = task.fallback_seed;
    std::vector<BinarySample> samples =
        relabel_for_partition(data, task.entry.side1, task.entry.side2);
    *task.slot = train(samples, opts);
  } catch (const Error& e) {
    throw Error(e.code(), "node " + task.entry.node_path + ": " + e.what(),
                e.line(), e.column());
  }
}

}  // namespace

TrainedMultiModel train_tree(const ControlNode& tree, const Dataset& data,
                             const TrainConfig& config) {
  ValidationReport report = validate(tree, data.n_classes);
  if (!report.clean()) {
    std::string msg = "control tree fails validation:";
    for (const auto& v : report.entries)
      if (!v.warning) msg += "\n  [" + v.node_path + "] " + v.message;
    throw Error(ErrorCode::ValidationFailed, msg);
  }

  TrainedMultiModel model;
  model.n_classes = data.n_classes;
  model.dim = data.dim();

  std::vector<TrainTask> tasks;
  model.root = build_skeleton(tree, "0", tasks);
  for (std::size_t i = 0; i < tasks.size(); ++i)
    tasks[i].fallback_seed = config.base_seed + i;

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1 || tasks.size() <= 1) {
    for (const TrainTask& task : tasks) run_task(task, data);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          run_task(tasks[i], data);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const std::size_t width = std::min<std::size_t>(tasks.size(),
                                                    static_cast<std::size_t>(jobs));
    for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Export / import
// ---------------------------------------------------------------------------

namespace {

ControlNodePtr export_walk(const TrainedNode& node, const std::string& path,
                           const std::string& directory, const std::string& base,
                           std::vector<std::string>& files) {
  auto out = std::make_unique<ControlNode>();
  out->kind = node.kind;
  out->leaf_class = node.leaf_class;
  switch (node.kind) {
    case NodeKind::Leaf:
      return out;
    case NodeKind::TwoClass: {
      const std::string name = base + "." + path + ".mbm";
      save_model_file(node.model, (fs::path(directory) / name).string());
      files.push_back(name);
      out->spec = ModelSpec{ModelSpec::Kind::ModelName, name};
      break;
    }
    case NodeKind::Partitioned: {
      out->partitions = node.partitions;
      for (std::size_t i = 0; i < node.partition_models.size(); ++i) {
        const std::string name = base + "." + path + ".p" + std::to_string(i) + ".mbm";
        save_model_file(node.partition_models[i],
                        (fs::path(directory) / name).string());
        files.push_back(name);
        out->partitions[i].spec = ModelSpec{ModelSpec::Kind::ModelName, name};
      }
      break;
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i)
    out->children.push_back(export_walk(*node.children[i],
                                        path + "." + std::to_string(i), directory,
                                        base, files));
  return out;
}

int max_leaf_class(const ControlNode& node) {
  if (node.kind == NodeKind::Leaf) return node.leaf_class;
  int best = -1;
  for (const auto& c : node.children) best = std::max(best, max_leaf_class(*c));
  return best;
}

std::unique_ptr<TrainedNode> load_walk(const ControlNode& node,
                                       const fs::path& directory,
                                       std::size_t& dim) {
  auto out = std::make_unique<TrainedNode>();
  out->kind = node.kind;
  out->leaf_class = node.leaf_class;
  auto absorb = [&dim](const BinaryModel& m) {
    if (dim == 0) dim = m.dim;
  };
  switch (node.kind) {
    case NodeKind::Leaf:
      return out;
    case NodeKind::TwoClass:
      out->model = load_model_file((directory / node.spec.text).string());
      absorb(out->model);
      break;
    case NodeKind::Partitioned: {
      out->partitions = node.partitions;
      out->coding = build_coding_matrix(node.partitions,
                                        static_cast<int>(node.children.size()));
      for (const Partition& part : node.partitions) {
        out->partition_models.push_back(
            load_model_file((directory / part.spec.text).string()));
        absorb(out->partition_models.back());
      }
      break;
    }
  }
  for (const auto& child : node.children)
    out->children.push_back(load_walk(*child, directory, dim));
  return out;
}

}  // namespace

ExportResult export_multi_model(const TrainedMultiModel& model,
                                const std::string& directory,
                                const std::string& base_name) {
  ExportResult result;
  std::error_code ec;
  fs::create_directories(directory, ec);

  ControlNodePtr control =
      export_walk(*model.root, "0", directory, base_name, result.model_files);

  const fs::path control_path = fs::path(directory) / (base_name + ".mbc");
  std::ofstream out(control_path);
  if (!out)
    throw Error(ErrorCode::IoError,
                "cannot open '" + control_path.string() + "' for writing");
  out << serialize(*control);
  if (!out) throw Error(ErrorCode::IoError, "short write to '" + control_path.string() + "'");
  result.control_path = control_path.string();
  return result;
}

TrainedMultiModel load_multi_model(const std::string& control_path) {
  std::ifstream in(control_path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open '" + control_path + "' for reading");
  std::ostringstream text;
  text << in.rdbuf();

  ControlNodePtr tree = parse_text(text.str(), Dialect::Classification);
  const int n_classes = max_leaf_class(*tree) + 1;
  ValidationReport report = validate(*tree, n_classes);
  if (!report.clean()) {
    std::string msg = "classification control file fails validation:";
    for (const auto& v : report.entries)
      if (!v.warning) msg += "\n  [" + v.node_path + "] " + v.message;
    throw Error(ErrorCode::ValidationFailed, msg);
  }

  TrainedMultiModel model;
  model.n_classes = n_classes;
  std::size_t dim = 0;
  model.root = load_walk(*tree, fs::path(control_path).parent_path(), dim);
  model.dim = dim;
  return model;
}

}  // namespace mborders
