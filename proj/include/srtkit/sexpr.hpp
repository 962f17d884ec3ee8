#ifndef SRTKIT_SEXPR_HPP
#define SRTKIT_SEXPR_HPP

// Immutable symbolic trees with substructure sharing.
//
// An SExpr is a handle to a node that is either an atom or a pair. Pairs
// hold handles to their children, so building a pair never copies its
// arguments and a child may be reachable along several paths. Value
// semantics are tree semantics: sharing is only visible through
// dag_size().

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace srtkit {

class Node;

/// Counted handle to an immutable node. Counts are not atomic: a tree and
/// its handles belong to one thread at a time.
class SExpr {
public:
  SExpr() noexcept = default;
  SExpr(std::nullptr_t) noexcept {}
  explicit SExpr(const Node* n) noexcept : n_(n) { retain(); }
  SExpr(const SExpr& o) noexcept : n_(o.n_) { retain(); }
  SExpr(SExpr&& o) noexcept : n_(o.n_) { o.n_ = nullptr; }
  SExpr& operator=(const SExpr& o) noexcept {
    SExpr(o).swap(*this);
    return *this;
  }
  SExpr& operator=(SExpr&& o) noexcept {
    SExpr(std::move(o)).swap(*this);
    return *this;
  }
  ~SExpr() { release(); }

  const Node* get() const noexcept { return n_; }
  const Node* operator->() const noexcept { return n_; }
  const Node& operator*() const noexcept { return *n_; }
  explicit operator bool() const noexcept { return n_ != nullptr; }
  inline long use_count() const noexcept;
  void swap(SExpr& o) noexcept { std::swap(n_, o.n_); }
  /// Identity, not structure; see equal().
  friend bool operator==(const SExpr& a, const SExpr& b) noexcept { return a.n_ == b.n_; }

private:
  inline void retain() const noexcept;
  inline void release() noexcept;
  const Node* n_ = nullptr;
};

class Node {
public:
  Node(std::string name) : name_(std::move(name)) {}
  Node(SExpr head, SExpr tail) : head_(std::move(head)), tail_(std::move(tail)), pair_(true) {}

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  // Nodes are recycled through a per-thread free list.
  static void* operator new(std::size_t size) {
    auto& free = free_list();
    if (size == sizeof(Node) && free) {
      void* p = free;
      free = *static_cast<void**>(p);
      return p;
    }
    return ::operator new(size);
  }
  static void operator delete(void* p, std::size_t size) noexcept {
    if (size != sizeof(Node)) return ::operator delete(p);
    auto& free = free_list();
    *static_cast<void**>(p) = free;
    free = p;
  }

  // Long right spines (unary numerals, big inputs) would otherwise recurse
  // once per node in the implicit destructor chain.
  ~Node() {
    if (!owns_unique_child()) return;
    std::vector<SExpr> pending;
    detach_unique(head_, pending);
    detach_unique(tail_, pending);
    while (!pending.empty()) {
      SExpr n = std::move(pending.back());
      pending.pop_back();
      auto& node = const_cast<Node&>(*n);
      detach_unique(node.head_, pending);
      detach_unique(node.tail_, pending);
    }
  }

  bool is_pair() const noexcept { return pair_; }
  bool is_atom() const noexcept { return !pair_; }
  bool is_nil() const noexcept { return !pair_ && name_.empty(); }

  /// Atom name; "" for the empty list.
  const std::string& name() const noexcept { return name_; }
  const SExpr& head() const noexcept { return head_; }
  const SExpr& tail() const noexcept { return tail_; }

private:
  friend class SExpr;

  bool owns_unique_child() const noexcept {
    return (head_ && head_.use_count() == 1) || (tail_ && tail_.use_count() == 1);
  }
  static void detach_unique(SExpr& child, std::vector<SExpr>& out) {
    if (child && child.use_count() == 1) out.push_back(std::move(child));
  }

  static void*& free_list() noexcept {
    thread_local void* head = nullptr;
    return head;
  }

  mutable long refs_ = 0;
  std::string name_;
  SExpr head_;
  SExpr tail_;
  bool pair_ = false;
};

inline long SExpr::use_count() const noexcept { return n_ ? n_->refs_ : 0; }
inline void SExpr::retain() const noexcept {
  if (n_) ++n_->refs_;
}
inline void SExpr::release() noexcept {
  if (n_ && --n_->refs_ == 0) delete n_;
  n_ = nullptr;
}

/// The empty list `()`. A single shared node.
inline const SExpr& nil() {
  static const SExpr n(new Node(std::string{}));
  return n;
}

inline SExpr atom(std::string name) {
  if (name.empty()) return nil();
  return SExpr(new Node(std::move(name)));
}

inline SExpr pair(SExpr head, SExpr tail) {
  return SExpr(new Node(std::move(head), std::move(tail)));
}

/// head/tail are total: on an atom they yield `()`.
inline const SExpr& head(const SExpr& s) noexcept { return s->is_pair() ? s->head() : nil(); }
inline const SExpr& tail(const SExpr& s) noexcept { return s->is_pair() ? s->tail() : nil(); }

inline bool is_atom_named(const SExpr& s, std::string_view name) {
  return s->is_atom() && s->name() == name;
}

/// list(a, b, c) = (a b c)
inline SExpr list(std::initializer_list<SExpr> items) {
  SExpr out = nil();
  for (auto it = std::rbegin(items); it != std::rend(items); ++it) out = pair(*it, std::move(out));
  return out;
}

inline SExpr list_from(const std::vector<SExpr>& items) {
  SExpr out = nil();
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = pair(*it, std::move(out));
  return out;
}

/// Elements of a proper list; stops at the first non-pair tail.
inline std::vector<SExpr> list_items(const SExpr& s) {
  std::vector<SExpr> out;
  for (const Node* n = s.get(); n->is_pair(); n = n->tail().get()) out.push_back(n->head());
  return out;
}

/// Number of elements when `s` is a proper list; nullopt-like -1 otherwise.
inline std::ptrdiff_t proper_length(const SExpr& s) {
  std::ptrdiff_t len = 0;
  const Node* n = s.get();
  for (; n->is_pair(); n = n->tail().get()) ++len;
  return n->is_nil() ? len : -1;
}

// ---------------------------------------------------------------------------
// Equality

/// Structural equality. Identical nodes compare equal without descent.
inline bool equal(const SExpr& a, const SExpr& b) {
  if (a.get() == b.get()) return true;
  if (a->is_pair() != b->is_pair()) return false;
  if (!a->is_pair()) return a->name() == b->name();
  std::vector<std::pair<const Node*, const Node*>> work;
  work.emplace_back(a.get(), b.get());
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    if (x == y) continue;
    if (x->is_pair() != y->is_pair()) return false;
    if (!x->is_pair()) {
      if (x->name() != y->name()) return false;
      continue;
    }
    work.emplace_back(x->tail().get(), y->tail().get());
    work.emplace_back(x->head().get(), y->head().get());
  }
  return true;
}

// ---------------------------------------------------------------------------
// Size measures

struct Measure {
  std::uint64_t tree_size = 0;
  std::uint64_t dag_size = 0;
  friend bool operator==(const Measure&, const Measure&) = default;
};

namespace detail {
inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  constexpr auto max = std::numeric_limits<std::uint64_t>::max();
  return a > max - b ? max : a + b;
}
}  // namespace detail

/// tree_size counts every path (a shared node counts once per visit);
/// dag_size counts distinct nodes. Saturates at UINT64_MAX.
inline Measure measure(const SExpr& s) {
  std::unordered_map<const Node*, std::uint64_t> tree;
  std::vector<std::pair<const Node*, bool>> stack;
  stack.emplace_back(s.get(), false);
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (!expanded) {
      if (tree.count(n)) continue;
      if (!n->is_pair()) {
        tree.emplace(n, 1);
        continue;
      }
      stack.emplace_back(n, true);
      stack.emplace_back(n->tail().get(), false);
      stack.emplace_back(n->head().get(), false);
    } else {
      if (tree.count(n)) continue;
      tree.emplace(n, detail::sat_add(1, detail::sat_add(tree.at(n->head().get()),
                                                         tree.at(n->tail().get()))));
    }
  }
  return {tree.at(s.get()), tree.size()};
}

inline std::uint64_t tree_size(const SExpr& s) { return measure(s).tree_size; }
inline std::uint64_t dag_size(const SExpr& s) { return measure(s).dag_size; }

// ---------------------------------------------------------------------------
// Text format

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

namespace detail {

inline bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_all() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty input", pos_);
    SExpr s = read();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected token after expression", pos_);
    return s;
  }

private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ';') {
        // `;;` starts a line comment; a lone `;` is the sequencing atom.
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string read_token() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  SExpr read() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == ')') throw ParseError("unbalanced ')'", pos_);
    if (c != '(') return atom(read_token());

    std::size_t open = pos_++;
    std::vector<SExpr> items;
    SExpr last = nil();
    for (;;) {
      skip_space();
      if (pos_ == text_.size()) throw ParseError("unbalanced '('", open);
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      std::size_t token_start = pos_;
      if (text_[pos_] == '.' && pos_ + 1 <= text_.size() &&
          (pos_ + 1 == text_.size() || is_delimiter(text_[pos_ + 1]))) {
        if (items.empty()) throw ParseError("dot with no preceding element", token_start);
        ++pos_;
        last = read();
        skip_space();
        if (pos_ == text_.size()) throw ParseError("unbalanced '('", open);
        if (text_[pos_] != ')') throw ParseError("expected ')' after dotted tail", pos_);
        ++pos_;
        break;
      }
      items.push_back(read());
    }
    SExpr out = std::move(last);
    for (auto it = items.rbegin(); it != items.rend(); ++it) out = pair(*it, std::move(out));
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void write(const Node* n, std::string& out) {
  if (!n->is_pair()) {
    out += n->is_nil() ? "()" : n->name();
    return;
  }
  out += '(';
  for (;;) {
    write(n->head().get(), out);
    const Node* t = n->tail().get();
    if (t->is_nil()) break;
    if (!t->is_pair()) {
      out += " . ";
      write(t, out);
      break;
    }
    out += ' ';
    n = t;
  }
  out += ')';
}

}  // namespace detail

/// Parse one expression. `(a b)` abbreviates right-nested pairs ending in
/// `()`, `(a . b)` is a dotted pair, and `;;` starts a comment.
inline SExpr parse(std::string_view text) { return detail::Reader(text).read_all(); }

/// Canonical text: list notation when the tail chain ends in `()`.
inline std::string print(const SExpr& s) {
  std::string out;
  detail::write(s.get(), out);
  return out;
}

// ---------------------------------------------------------------------------
// Unary numerals
//
// A numeral denotes the number of `1` atoms among its leaves. The canonical
// form n = (1 1 ... 1) is a proper list; `cons` of two numerals is their sum,
// so products built by repeated consing of one shared operand stay small as
// DAGs.

inline SExpr numeral(std::uint64_t n) {
  SExpr out = nil();
  const SExpr one = atom("1");
  for (std::uint64_t i = 0; i < n; ++i) out = pair(one, std::move(out));
  return out;
}

inline std::uint64_t numeral_value(const SExpr& s) {
  std::unordered_map<const Node*, std::uint64_t> count;
  std::vector<std::pair<const Node*, bool>> stack;
  stack.emplace_back(s.get(), false);
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (count.count(n)) continue;
    if (!n->is_pair()) {
      count.emplace(n, n->name() == "1" ? 1 : 0);
    } else if (!expanded) {
      stack.emplace_back(n, true);
      stack.emplace_back(n->tail().get(), false);
      stack.emplace_back(n->head().get(), false);
    } else {
      count.emplace(n, detail::sat_add(count.at(n->head().get()), count.at(n->tail().get())));
    }
  }
  return count.at(s.get());
}

}  // namespace srtkit

#endif  // SRTKIT_SEXPR_HPP
