#include "mborders/control_lang.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace mborders {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

bool is_word_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  if (std::isspace(u)) return false;
  switch (c) {
    case '{': case '}': case '/': case ';': case '"': case '#':
      return false;
    default:
      break;
  }
  // Control bytes other than whitespace are rejected by the caller.
  return u >= 0x21;
}

bool is_integer_word(const std::string& w) {
  if (w.empty()) return false;
  return std::all_of(w.begin(), w.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1, col = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto advance = [&](char c) {
    if (c == '\n') { ++line; col = 1; } else { ++col; }
    ++i;
  };

  while (i < n) {
    char c = text[i];
    unsigned char u = static_cast<unsigned char>(c);
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f') {
      advance(c);
      continue;
    }
    if (c == '#') {
      while (i < n && text[i] != '\n') advance(text[i]);
      continue;
    }
    if (c == '{') { tokens.push_back({TokenKind::LBrace, "{", line, col}); advance(c); continue; }
    if (c == '}') { tokens.push_back({TokenKind::RBrace, "}", line, col}); advance(c); continue; }
    if (c == '/') { tokens.push_back({TokenKind::Slash, "/", line, col}); advance(c); continue; }
    if (c == ';') { tokens.push_back({TokenKind::Semicolon, ";", line, col}); advance(c); continue; }
    if (c == '"') {
      int start_line = line, start_col = col;
      advance(c);
      std::string value;
      bool closed = false;
      while (i < n) {
        char d = text[i];
        if (d == '\\' && i + 1 < n && text[i + 1] == '"') {
          value.push_back('"');
          advance(d);
          advance(text[i]);
          continue;
        }
        if (d == '"') {
          advance(d);
          closed = true;
          break;
        }
        value.push_back(d);
        advance(d);
      }
      if (!closed)
        throw Error(ErrorCode::UnterminatedString, "string opened here never closes",
                    start_line, start_col);
      tokens.push_back({TokenKind::QuotedString, value, start_line, start_col});
      continue;
    }
    if (is_word_char(c)) {
      int start_line = line, start_col = col;
      std::string word;
      while (i < n && is_word_char(text[i])) {
        word.push_back(text[i]);
        advance(text[i]);
      }
      tokens.push_back({is_integer_word(word) ? TokenKind::Integer : TokenKind::Name,
                        word, start_line, start_col});
      continue;
    }
    throw Error(ErrorCode::IllegalCharacter,
                "byte 0x" + [](unsigned char b) {
                  const char* hex = "0123456789abcdef";
                  return std::string{hex[b >> 4], hex[b & 0xf]};
                }(u),
                line, col);
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
  Parser(const std::vector<Token>& tokens, Dialect dialect)
      : tokens_(tokens), dialect_(dialect) {}

  ControlNodePtr run() {
    ControlNodePtr root = parse_branch();
    if (pos_ < tokens_.size()) {
      const Token& t = tokens_[pos_];
      throw Error(ErrorCode::TrailingTokens,
                  "input continues past the end of the top-level branch ('" +
                      t.text + "')",
                  t.line, t.column);
    }
    return root;
  }

private:
  const Token* peek(std::size_t ahead = 0) const {
    std::size_t k = pos_ + ahead;
    return k < tokens_.size() ? &tokens_[k] : nullptr;
  }

  const Token& take() {
    if (pos_ >= tokens_.size())
      throw Error(ErrorCode::SyntaxError, "unexpected end of input",
                  last_line(), last_col());
    return tokens_[pos_++];
  }

  int last_line() const { return tokens_.empty() ? 1 : tokens_.back().line; }
  int last_col() const { return tokens_.empty() ? 1 : tokens_.back().column; }

  [[noreturn]] void fail(const Token* t, const std::string& expected) {
    if (t)
      throw Error(ErrorCode::SyntaxError,
                  "expected " + expected + ", found '" + t->text + "'",
                  t->line, t->column);
    throw Error(ErrorCode::SyntaxError, "expected " + expected + ", found end of input",
                last_line(), last_col());
  }

  bool is_twoclass_terminal(const Token& t) const {
    return t.kind == TokenKind::QuotedString || t.kind == TokenKind::Name;
  }

  // Checks dialect purity of a <TWOCLASS> terminal and converts it.
  ModelSpec model_spec(const Token& t) {
    if (dialect_ == Dialect::Training) {
      if (t.kind != TokenKind::QuotedString)
        throw Error(ErrorCode::DialectMismatch,
                    "training dialect requires a double-quoted option string, found '" +
                        t.text + "'",
                    t.line, t.column);
      return ModelSpec{ModelSpec::Kind::TrainingOptions, t.text};
    }
    if (t.kind != TokenKind::Name)
      throw Error(ErrorCode::DialectMismatch,
                  "classification dialect requires a model file name, found " +
                      std::string(t.kind == TokenKind::QuotedString
                                      ? "a quoted string"
                                      : "'" + t.text + "'"),
                  t.line, t.column);
    return ModelSpec{ModelSpec::Kind::ModelName, t.text};
  }

  int class_value(const Token& t) {
    if (t.kind != TokenKind::Integer) fail(&t, "a class value");
    try {
      return std::stoi(t.text);
    } catch (const std::exception&) {
      throw Error(ErrorCode::SyntaxError, "class value '" + t.text + "' out of range",
                  t.line, t.column);
    }
  }

  // <branch> ::= <model> "{" <branch-list> "}" | <CLASS>
  ControlNodePtr parse_branch() {
    const Token* t = peek();
    if (!t) fail(nullptr, "a branch");

    if (t->kind == TokenKind::Integer) {
      // An integer in model position would shadow a leaf; catch the common
      // mistake of writing a bare number where a model is meant.
      const Token* next = peek(1);
      if (next && next->kind == TokenKind::LBrace)
        throw Error(ErrorCode::DialectMismatch,
                    "an integer cannot name a model ('" + t->text + "' before '{')",
                    t->line, t->column);
      auto leaf = std::make_unique<ControlNode>();
      leaf->kind = NodeKind::Leaf;
      leaf->leaf_class = class_value(take());
      return leaf;
    }

    if (!is_twoclass_terminal(*t)) fail(t, "a class value or a two-class model");

    // Lookahead decides between a plain two-class model and a partition list.
    const Token* next = peek(1);
    if (next && next->kind == TokenKind::Integer) return parse_partition_node();
    if (next && next->kind == TokenKind::LBrace) return parse_twoclass_node();
    fail(next, "'{' or a partition class list after the model");
  }

  ControlNodePtr parse_twoclass_node() {
    auto node = std::make_unique<ControlNode>();
    node->kind = NodeKind::TwoClass;
    node->spec = model_spec(take());
    take();  // '{' guaranteed by lookahead
    parse_branch_list(*node);
    if (node->children.size() != 2) {
      const Token* t = peek();
      throw Error(ErrorCode::SyntaxError,
                  "a two-class model takes exactly 2 branches, found " +
                      std::to_string(node->children.size()),
                  t ? t->line : last_line(), t ? t->column : last_col());
    }
    return node;
  }

  ControlNodePtr parse_partition_node() {
    auto node = std::make_unique<ControlNode>();
    node->kind = NodeKind::Partitioned;
    // <partition-list> ::= one or more <partition>
    while (true) {
      const Token* t = peek();
      if (!t) fail(nullptr, "a partition or '{'");
      if (t->kind == TokenKind::LBrace) break;
      if (!is_twoclass_terminal(*t)) fail(t, "a partition model or '{'");
      node->partitions.push_back(parse_partition());
    }
    take();  // '{'
    parse_branch_list(*node);
    return node;
  }

  // <partition> ::= <TWOCLASS> <class-list> "/" <class-list> ";"
  Partition parse_partition() {
    Partition part;
    part.spec = model_spec(take());
    part.side1 = parse_class_list("a class value");
    const Token& slash = take();
    if (slash.kind != TokenKind::Slash) fail(&slash, "'/'");
    part.side2 = parse_class_list("a class value");
    const Token& semi = take();
    if (semi.kind != TokenKind::Semicolon) fail(&semi, "';'");
    return part;
  }

  std::vector<int> parse_class_list(const std::string& what) {
    std::vector<int> classes;
    const Token* t = peek();
    if (!t || t->kind != TokenKind::Integer) fail(t, what);
    while ((t = peek()) && t->kind == TokenKind::Integer)
      classes.push_back(class_value(take()));
    return classes;
  }

  void parse_branch_list(ControlNode& node) {
    while (true) {
      const Token* t = peek();
      if (!t) fail(nullptr, "a branch or '}'");
      if (t->kind == TokenKind::RBrace) {
        take();
        if (node.children.empty()) fail(t, "at least one branch");
        return;
      }
      node.children.push_back(parse_branch());
    }
  }

  const std::vector<Token>& tokens_;
  Dialect dialect_;
  std::size_t pos_ = 0;
};

}  // namespace

ControlNodePtr parse(const std::vector<Token>& tokens, Dialect dialect) {
  if (tokens.empty())
    throw Error(ErrorCode::SyntaxError, "empty input", 1, 1);
  return Parser(tokens, dialect).run();
}

ControlNodePtr parse_text(const std::string& text, Dialect dialect) {
  return parse(tokenize(text), dialect);
}

// ---------------------------------------------------------------------------
// Structural helpers
// ---------------------------------------------------------------------------

bool trees_equal(const ControlNode& a, const ControlNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Leaf:
      return a.leaf_class == b.leaf_class;
    case NodeKind::TwoClass:
      if (!(a.spec == b.spec)) return false;
      break;
    case NodeKind::Partitioned: {
      if (a.partitions.size() != b.partitions.size()) return false;
      for (std::size_t i = 0; i < a.partitions.size(); ++i) {
        const Partition& pa = a.partitions[i];
        const Partition& pb = b.partitions[i];
        if (!(pa.spec == pb.spec) || pa.side1 != pb.side1 || pa.side2 != pb.side2)
          return false;
      }
      break;
    }
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!trees_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

ControlNodePtr clone_tree(const ControlNode& node) {
  auto out = std::make_unique<ControlNode>();
  out->kind = node.kind;
  out->leaf_class = node.leaf_class;
  out->spec = node.spec;
  out->partitions = node.partitions;
  out->children.reserve(node.children.size());
  for (const auto& c : node.children) out->children.push_back(clone_tree(*c));
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::string join_path(const std::string& base, std::size_t idx) {
  return base + "." + std::to_string(idx);
}

struct Validator {
  int n_classes;
  const ValidateOptions& opts;
  ValidationReport report;
  std::map<int, int> leaf_counts;

  void add(ViolationKind kind, bool warning, const std::string& path,
           const std::string& message) {
    report.entries.push_back({kind, warning, path, message});
  }

  void walk(const ControlNode& node, const std::string& path) {
    switch (node.kind) {
      case NodeKind::Leaf: {
        if (node.leaf_class < 0 || node.leaf_class >= n_classes)
          add(ViolationKind::ClassOutOfRange, false, path,
              "leaf class " + std::to_string(node.leaf_class) +
                  " outside [0, " + std::to_string(n_classes) + ")");
        ++leaf_counts[node.leaf_class];
        return;
      }
      case NodeKind::TwoClass:
        if (node.children.size() != 2)
          add(ViolationKind::ChildCountMismatch, false, path,
              "two-class node has " + std::to_string(node.children.size()) +
                  " branches, needs 2");
        break;
      case NodeKind::Partitioned:
        check_partitions(node, path);
        break;
    }
    for (std::size_t i = 0; i < node.children.size(); ++i)
      walk(*node.children[i], join_path(path, i));
  }

  void check_partitions(const ControlNode& node, const std::string& path) {
    int max_local = -1;
    std::set<int> referenced;
    for (std::size_t i = 0; i < node.partitions.size(); ++i) {
      const Partition& part = node.partitions[i];
      std::string ppath = path + ".p" + std::to_string(i);
      std::set<int> s1(part.side1.begin(), part.side1.end());
      std::set<int> s2(part.side2.begin(), part.side2.end());
      std::vector<int> overlap;
      std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                            std::back_inserter(overlap));
      if (!overlap.empty())
        add(ViolationKind::SideOverlap, false, ppath,
            "class " + std::to_string(overlap.front()) +
                " appears on both sides of the partition");
      std::set<int> all;
      all.insert(s1.begin(), s1.end());
      all.insert(s2.begin(), s2.end());
      if (all.size() < 2)
        add(ViolationKind::NonSplittingPartition, false, ppath,
            "partition must reference at least two distinct classes");
      for (int c : all) {
        max_local = std::max(max_local, c);
        referenced.insert(c);
      }
    }

    const std::size_t child_count = node.children.size();
    const std::size_t expected = static_cast<std::size_t>(max_local + 1);
    if (child_count != expected)
      add(ViolationKind::ChildCountMismatch, false, path,
          "partitions reference " + std::to_string(expected) +
              " local classes but the node has " + std::to_string(child_count) +
              " branches");
    for (std::size_t j = 0; j < child_count; ++j)
      if (!referenced.count(static_cast<int>(j)))
        add(ViolationKind::OrphanLocalClass, false, path,
            "local class " + std::to_string(j) + " appears in no partition");

    // A partition may leave some local classes out (their coding-row
    // coefficient becomes 0); flag it since the usual layout lists them all.
    for (std::size_t i = 0; i < node.partitions.size(); ++i) {
      const Partition& part = node.partitions[i];
      std::set<int> all(part.side1.begin(), part.side1.end());
      all.insert(part.side2.begin(), part.side2.end());
      if (all.size() < child_count && child_count == expected)
        add(ViolationKind::PartitionOmitsClasses, true,
            path + ".p" + std::to_string(i),
            "partition omits " + std::to_string(child_count - all.size()) +
                " of the node's local classes");
    }
  }
};

}  // namespace

ValidationReport validate(const ControlNode& root, int n_classes,
                          const ValidateOptions& opts) {
  Validator v{n_classes, opts, {}, {}};
  v.walk(root, "0");
  for (const auto& [cls, count] : v.leaf_counts) {
    if (count > 1 && !opts.allow_duplicate_leaves)
      v.add(ViolationKind::DuplicateLeafClass, false, "0",
            "class " + std::to_string(cls) + " appears at " +
                std::to_string(count) + " leaves");
  }
  for (int c = 0; c < n_classes; ++c) {
    if (!v.leaf_counts.count(c))
      v.add(ViolationKind::MissingClass, false, "0",
            "class " + std::to_string(c) + " is not reachable from any leaf");
  }
  return v.report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\\\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string spec_text(const ModelSpec& spec) {
  return spec.kind == ModelSpec::Kind::TrainingOptions ? quote(spec.text) : spec.text;
}

void write_node(const ControlNode& node, int depth, std::string& out) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  switch (node.kind) {
    case NodeKind::Leaf:
      out += indent + std::to_string(node.leaf_class) + "\n";
      return;
    case NodeKind::TwoClass:
      out += indent + spec_text(node.spec) + " {\n";
      break;
    case NodeKind::Partitioned: {
      for (const Partition& part : node.partitions) {
        out += indent + spec_text(part.spec);
        for (int c : part.side1) out += " " + std::to_string(c);
        out += " /";
        for (int c : part.side2) out += " " + std::to_string(c);
        out += ";\n";
      }
      out += indent + "{\n";
      break;
    }
  }
  for (const auto& child : node.children) write_node(*child, depth + 1, out);
  out += indent + "}\n";
}

}  // namespace

std::string serialize(const ControlNode& root) {
  std::string out;
  write_node(root, 0, out);
  return out;
}

}  // namespace mborders
