#ifndef MBORDERS_CONTROL_LANG_HPP
#define MBORDERS_CONTROL_LANG_HPP

#include <memory>
#include <string>
#include <vector>

#include "mborders/errors.hpp"

namespace mborders {

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokenKind {
  QuotedString,  // text without the surrounding quotes
  Name,          // model file name (classification dialect)
  Integer,       // non-negative
  LBrace,
  RBrace,
  Slash,
  Semicolon,
};

struct Token {
  TokenKind kind;
  std::string text;
  int line = 0;    // 1-based
  int column = 0;  // 1-based
};

// Splits control-file text into tokens. Whitespace separates tokens and is
// otherwise insignificant; `#` starts a comment running to end of line.
// Inside double quotes the only escape sequence is `\"`.
// Throws Error{UnterminatedString, IllegalCharacter}.
std::vector<Token> tokenize(const std::string& text);

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class Dialect { Training, Classification };

// A <TWOCLASS> terminal: quoted option string when training, model file name
// when classifying. One tree holds specs of a single variant throughout.
struct ModelSpec {
  enum class Kind { TrainingOptions, ModelName };
  Kind kind = Kind::TrainingOptions;
  std::string text;

  bool operator==(const ModelSpec&) const = default;
};

// One binary split of a partition list. Side indices are local to the
// enclosing node's child list.
struct Partition {
  ModelSpec spec;
  std::vector<int> side1;
  std::vector<int> side2;
};

enum class NodeKind { Leaf, TwoClass, Partitioned };

struct ControlNode {
  NodeKind kind = NodeKind::Leaf;
  int leaf_class = -1;                // Leaf: absolute class value
  ModelSpec spec;                     // TwoClass
  std::vector<Partition> partitions;  // Partitioned
  std::vector<std::unique_ptr<ControlNode>> children;
};

using ControlNodePtr = std::unique_ptr<ControlNode>;

bool trees_equal(const ControlNode& a, const ControlNode& b);
ControlNodePtr clone_tree(const ControlNode& node);

// Recursive-descent parse of a single <branch>. A two-class node takes
// exactly two child branches. Throws Error{SyntaxError, DialectMismatch,
// TrailingTokens}.
ControlNodePtr parse(const std::vector<Token>& tokens, Dialect dialect);

// Convenience: tokenize + parse.
ControlNodePtr parse_text(const std::string& text, Dialect dialect);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationKind {
  ClassOutOfRange,
  ChildCountMismatch,
  OrphanLocalClass,
  SideOverlap,
  NonSplittingPartition,
  DuplicateLeafClass,
  MissingClass,
  PartitionOmitsClasses,  // warning
};

struct Violation {
  ViolationKind kind;
  bool warning = false;
  std::string node_path;  // dotted child-index path, root = "0"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> entries;

  bool clean() const {
    for (const auto& v : entries)
      if (!v.warning) return false;
    return true;
  }
  bool empty() const { return entries.empty(); }
};

struct ValidateOptions {
  bool allow_duplicate_leaves = false;
};

// Collects every violation instead of stopping at the first one.
ValidationReport validate(const ControlNode& root, int n_classes,
                          const ValidateOptions& opts = {});

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

// Canonical text form: two-space indentation per depth, one partition per
// line, one branch per line. parse(serialize(t)) is structurally equal to t.
std::string serialize(const ControlNode& root);

}  // namespace mborders

#endif
