#ifndef SRTKIT_FLOWCHART_HPP
#define SRTKIT_FLOWCHART_HPP

// The flowchart language on S-expressions.
//
//   program  ::= (inputs body output)
//   command  ::= (:= x e) | (; c1 c2) | (while e c) | (if e c1 c2)
//   expr     ::= x | (QUOTE d) | (hd e) | (tl e) | (cons e1 e2)
//              | (= e1 e2) | (atom? e) | (*) | (univ e1 e2)
//
// TINY is the assignment/sequencing fragment. `(*)` and `univ` are the
// reflective forms and only run in Mode::reflective. Truth is "not ()".

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "srtkit/sexpr.hpp"

namespace srtkit {

namespace tag {
inline constexpr std::string_view assign = ":=";
inline constexpr std::string_view seq = ";";
inline constexpr std::string_view while_ = "while";
inline constexpr std::string_view if_ = "if";
inline constexpr std::string_view quote = "QUOTE";
inline constexpr std::string_view hd = "hd";
inline constexpr std::string_view tl = "tl";
inline constexpr std::string_view cons = "cons";
inline constexpr std::string_view eq = "=";
inline constexpr std::string_view atom_p = "atom?";
inline constexpr std::string_view self = "*";
inline constexpr std::string_view univ = "univ";
}  // namespace tag

/// Variables whose names start with this are reserved for generated code.
inline constexpr char reserved_prefix = '%';

inline bool is_reserved_name(std::string_view name) {
  return !name.empty() && name.front() == reserved_prefix;
}

// ---------------------------------------------------------------------------
// Syntax builders. These produce encoded programs directly; decode() turns
// them into runnable Programs.

namespace syn {

inline SExpr sym(std::string_view s) { return atom(std::string(s)); }
inline SExpr var(std::string_view name) { return sym(name); }
inline SExpr quote(SExpr d) { return list({sym(tag::quote), std::move(d)}); }
inline SExpr hd(SExpr e) { return list({sym(tag::hd), std::move(e)}); }
inline SExpr tl(SExpr e) { return list({sym(tag::tl), std::move(e)}); }
inline SExpr cons(SExpr a, SExpr b) { return list({sym(tag::cons), std::move(a), std::move(b)}); }
inline SExpr eq(SExpr a, SExpr b) { return list({sym(tag::eq), std::move(a), std::move(b)}); }
inline SExpr is_atom(SExpr e) { return list({sym(tag::atom_p), std::move(e)}); }
inline SExpr self_ref() { return list({sym(tag::self)}); }
inline SExpr univ(SExpr p, SExpr d) { return list({sym(tag::univ), std::move(p), std::move(d)}); }

/// list(e1, ..., en) as nested cons ending in '().
inline SExpr list_of(std::initializer_list<SExpr> items) {
  SExpr out = quote(nil());
  for (auto it = std::rbegin(items); it != std::rend(items); ++it) out = cons(*it, std::move(out));
  return out;
}

inline SExpr assign(std::string_view x, SExpr e) {
  return list({sym(tag::assign), var(x), std::move(e)});
}
inline SExpr seq2(SExpr a, SExpr b) { return list({sym(tag::seq), std::move(a), std::move(b)}); }

/// Right-nested sequence of one or more commands.
inline SExpr seq(std::initializer_list<SExpr> cmds) {
  if (cmds.size() == 0) throw std::invalid_argument("seq of no commands");
  auto it = std::rbegin(cmds);
  SExpr out = *it++;
  for (; it != std::rend(cmds); ++it) out = seq2(*it, std::move(out));
  return out;
}
inline SExpr seq(const std::vector<SExpr>& cmds) {
  if (cmds.empty()) throw std::invalid_argument("seq of no commands");
  SExpr out = cmds.back();
  for (auto it = std::next(cmds.rbegin()); it != cmds.rend(); ++it) out = seq2(*it, std::move(out));
  return out;
}

inline SExpr while_(SExpr test, SExpr body) {
  return list({sym(tag::while_), std::move(test), std::move(body)});
}
inline SExpr if_(SExpr test, SExpr then_c, SExpr else_c) {
  return list({sym(tag::if_), std::move(test), std::move(then_c), std::move(else_c)});
}

inline SExpr program(std::initializer_list<std::string_view> inputs, SExpr body,
                     std::string_view output) {
  std::vector<SExpr> names;
  for (auto n : inputs) names.push_back(var(n));
  return list({list_from(names), std::move(body), var(output)});
}

}  // namespace syn

// ---------------------------------------------------------------------------
// AST

struct Expr;
struct Command;
using ExprPtr = std::shared_ptr<const Expr>;
using CommandPtr = std::shared_ptr<const Command>;

struct Expr {
  enum class Kind : std::uint8_t { var, quote, hd, tl, cons, eq, is_atom, self_ref, univ };
  Kind kind;
  std::uint32_t slot = 0;  // var
  SExpr constant;          // quote; references the datum without copying
  ExprPtr lhs, rhs;
};

struct Command {
  enum class Kind : std::uint8_t { assign, seq, while_, if_ };
  Kind kind;
  std::uint32_t slot = 0;  // assign target
  ExprPtr expr;            // assign value, while/if test
  CommandPtr first, second;
};

class DecodeError : public std::runtime_error {
public:
  DecodeError(const std::string& what, const SExpr& subtree)
      : std::runtime_error(what + ": " + abbreviate(subtree)), subtree_(subtree) {}
  const SExpr& subtree() const noexcept { return subtree_; }

private:
  static std::string abbreviate(const SExpr& s) {
    std::string text = print(s);
    if (text.size() > 160) text = text.substr(0, 157) + "...";
    return text;
  }
  SExpr subtree_;
};

/// Where an encoded program came from. User source may not use reserved
/// variable names; generated code may.
enum class Origin { generated, user };

class Program {
public:
  const SExpr& encoding() const noexcept { return encoding_; }
  const SExpr& body_encoding() const noexcept { return head(tail(encoding_)); }
  const Command& body() const noexcept { return *body_; }

  std::size_t arity() const noexcept { return inputs_.size(); }
  const std::vector<std::string>& inputs() const noexcept { return inputs_; }
  const std::string& output() const noexcept { return slot_names_[output_slot_]; }

  std::size_t slot_count() const noexcept { return slot_names_.size(); }
  const std::vector<std::string>& variables() const noexcept { return slot_names_; }
  std::uint32_t output_slot() const noexcept { return output_slot_; }

  /// No while/if/(*)/univ anywhere in the body.
  bool is_tiny() const noexcept { return tiny_; }
  /// Uses (*) or univ.
  bool is_reflective() const noexcept { return reflective_; }

private:
  friend Program decode(const SExpr&, Origin);
  friend class ProgramDecoder;

  SExpr encoding_;
  CommandPtr body_;
  std::vector<std::string> inputs_;
  std::vector<std::string> slot_names_;
  std::uint32_t output_slot_ = 0;
  bool tiny_ = true;
  bool reflective_ = false;
};

class ProgramDecoder {
public:
  explicit ProgramDecoder(Origin origin) : origin_(origin) {}

  Program decode(const SExpr& s) {
    if (proper_length(s) != 3) throw DecodeError("program must be (inputs body output)", s);
    const SExpr& inputs = head(s);
    const SExpr& body = head(tail(s));
    const SExpr& output = head(tail(tail(s)));
    if (proper_length(inputs) < 0) throw DecodeError("inputs must be a list of variables", inputs);

    Program p;
    p.encoding_ = s;
    for (const SExpr& in : list_items(inputs)) {
      std::string name = variable_name(in);
      if (slots_.count(name)) throw DecodeError("duplicate input variable", in);
      slot_of(name);
      p.inputs_.push_back(std::move(name));
    }
    p.body_ = command(body);
    p.output_slot_ = slot_of(variable_name(output));
    p.slot_names_ = std::move(names_);
    p.tiny_ = tiny_;
    p.reflective_ = reflective_;
    return p;
  }

private:
  std::string variable_name(const SExpr& s) {
    if (!s->is_atom() || s->is_nil()) throw DecodeError("variable must be a non-empty atom", s);
    if (origin_ == Origin::user && is_reserved_name(s->name()))
      throw DecodeError("variable name uses the reserved '%' prefix", s);
    return s->name();
  }

  std::uint32_t slot_of(const std::string& name) {
    auto [it, inserted] = slots_.try_emplace(name, static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  static void expect_arity(const SExpr& s, std::ptrdiff_t n) {
    if (proper_length(s) != n + 1)
      throw DecodeError("wrong arity for '" + head(s)->name() + "'", s);
  }

  CommandPtr command(const SExpr& s) {
    if (!s->is_pair() || !head(s)->is_atom()) throw DecodeError("malformed command", s);
    const std::string& t = head(s)->name();
    auto c = std::make_shared<Command>();
    if (t == tag::assign) {
      expect_arity(s, 2);
      c->kind = Command::Kind::assign;
      c->slot = slot_of(variable_name(head(tail(s))));
      c->expr = expr(head(tail(tail(s))));
    } else if (t == tag::seq) {
      expect_arity(s, 2);
      c->kind = Command::Kind::seq;
      c->first = command(head(tail(s)));
      c->second = command(head(tail(tail(s))));
    } else if (t == tag::while_) {
      expect_arity(s, 2);
      tiny_ = false;
      c->kind = Command::Kind::while_;
      c->expr = expr(head(tail(s)));
      c->first = command(head(tail(tail(s))));
    } else if (t == tag::if_) {
      expect_arity(s, 3);
      tiny_ = false;
      c->kind = Command::Kind::if_;
      c->expr = expr(head(tail(s)));
      c->first = command(head(tail(tail(s))));
      c->second = command(head(tail(tail(tail(s)))));
    } else {
      throw DecodeError("unknown command tag '" + t + "'", s);
    }
    return c;
  }

  ExprPtr expr(const SExpr& s) {
    auto e = std::make_shared<Expr>();
    if (s->is_atom()) {
      e->kind = Expr::Kind::var;
      e->slot = slot_of(variable_name(s));
      return e;
    }
    if (!head(s)->is_atom() || head(s)->is_nil()) throw DecodeError("malformed expression", s);
    const std::string& t = head(s)->name();
    auto unary = [&](Expr::Kind k) {
      expect_arity(s, 1);
      e->kind = k;
      e->lhs = expr(head(tail(s)));
    };
    auto binary = [&](Expr::Kind k) {
      expect_arity(s, 2);
      e->kind = k;
      e->lhs = expr(head(tail(s)));
      e->rhs = expr(head(tail(tail(s))));
    };
    if (t == tag::quote) {
      expect_arity(s, 1);
      e->kind = Expr::Kind::quote;
      e->constant = head(tail(s));
    } else if (t == tag::hd) {
      unary(Expr::Kind::hd);
    } else if (t == tag::tl) {
      unary(Expr::Kind::tl);
    } else if (t == tag::cons) {
      binary(Expr::Kind::cons);
    } else if (t == tag::eq) {
      binary(Expr::Kind::eq);
    } else if (t == tag::atom_p) {
      unary(Expr::Kind::is_atom);
    } else if (t == tag::self) {
      expect_arity(s, 0);
      e->kind = Expr::Kind::self_ref;
      tiny_ = false;
      reflective_ = true;
    } else if (t == tag::univ) {
      binary(Expr::Kind::univ);
      tiny_ = false;
      reflective_ = true;
    } else {
      throw DecodeError("unknown expression tag '" + t + "'", s);
    }
    return e;
  }

  Origin origin_;
  std::unordered_map<std::string, std::uint32_t> slots_;
  std::vector<std::string> names_;
  bool tiny_ = true;
  bool reflective_ = false;
};

inline Program decode(const SExpr& s, Origin origin = Origin::generated) {
  return ProgramDecoder(origin).decode(s);
}

/// Programs keep the S-expression they were decoded from, so encoding is
/// the identity on that value (sharing included).
inline const SExpr& encode(const Program& p) noexcept { return p.encoding(); }

inline bool is_tiny(const Program& p) noexcept { return p.is_tiny(); }

// ---------------------------------------------------------------------------
// Syntactic utilities over encoded programs

namespace detail {

using Renamer = std::function<std::string(const std::string&)>;

inline SExpr rename_expr(const SExpr& e, const Renamer& f) {
  if (e->is_atom()) return atom(f(e->name()));
  const std::string& t = head(e)->name();
  if (t == tag::quote || t == tag::self) return e;
  std::vector<SExpr> items{head(e)};
  for (const SExpr& arg : list_items(tail(e))) items.push_back(rename_expr(arg, f));
  return list_from(items);
}

inline SExpr rename_command(const SExpr& c, const Renamer& f) {
  const std::string& t = head(c)->name();
  if (t == tag::assign)
    return list({head(c), atom(f(head(tail(c))->name())), rename_expr(head(tail(tail(c))), f)});
  if (t == tag::seq)
    return list({head(c), rename_command(head(tail(c)), f), rename_command(head(tail(tail(c))), f)});
  if (t == tag::while_)
    return list({head(c), rename_expr(head(tail(c)), f), rename_command(head(tail(tail(c))), f)});
  if (t == tag::if_)
    return list({head(c), rename_expr(head(tail(c)), f), rename_command(head(tail(tail(c))), f),
                 rename_command(head(tail(tail(tail(c)))), f)});
  throw DecodeError("unknown command tag '" + t + "'", c);
}

}  // namespace detail

/// Applies `f` to every variable occurrence of an encoded program (inputs,
/// body and output). Quoted data is left untouched and stays shared.
inline SExpr rename_variables(const SExpr& program, const detail::Renamer& f) {
  decode(program);  // validates shape
  std::vector<SExpr> inputs;
  for (const SExpr& in : list_items(head(program))) inputs.push_back(atom(f(in->name())));
  return list({list_from(inputs), detail::rename_command(head(tail(program)), f),
               atom(f(head(tail(tail(program)))->name()))});
}

/// Renames every variable v to prefix + v.
inline SExpr prefix_variables(const SExpr& program, const std::string& prefix) {
  return rename_variables(program, [&](const std::string& v) { return prefix + v; });
}

inline std::set<std::string> variable_set(const Program& p) {
  return {p.variables().begin(), p.variables().end()};
}

// ---------------------------------------------------------------------------
// Interpreter

enum class Mode { plain, reflective };

enum class Status { halted, fuel_exhausted, runtime_error };

inline const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::halted: return "halted";
    case Status::fuel_exhausted: return "fuel_exhausted";
    case Status::runtime_error: return "runtime_error";
  }
  return "?";
}

struct RunResult {
  std::optional<SExpr> value;  // present iff halted
  std::uint64_t steps = 0;     // Blum time measure
  Status status = Status::halted;
  std::string detail;

  bool halted() const noexcept { return status == Status::halted; }
};

/// Same outcome: both halted with structurally equal values, or both
/// stopped for the same reason.
inline bool same_outcome(const RunResult& a, const RunResult& b) {
  if (a.status != b.status) return false;
  if (a.status != Status::halted) return true;
  return equal(*a.value, *b.value);
}

namespace detail {

struct FuelOut {};
struct RuntimeFault {
  std::string detail;
};

inline const SExpr& true_atom() {
  static const SExpr one = atom("1");
  return one;
}

class Machine {
public:
  Machine(const Program& root, std::uint64_t fuel, Mode mode)
      : current_(&root), fuel_(fuel), mode_(mode) {}

  SExpr run(const Program& p, std::span<const SExpr> args) {
    std::vector<SExpr> env(p.slot_count(), nil());
    for (std::size_t i = 0; i < args.size() && i < p.arity(); ++i) env[i] = args[i];
    exec(p.body(), env);
    charge();  // reading the output variable
    return env[p.output_slot()];
  }

  std::uint64_t steps() const noexcept { return steps_; }

private:
  void charge() {
    if (steps_ == fuel_) throw FuelOut{};
    ++steps_;
  }

  void exec(const Command& cmd, std::vector<SExpr>& env) {
    const Command* c = &cmd;
    for (;;) {
      switch (c->kind) {
        case Command::Kind::assign: {
          SExpr v = eval(*c->expr, env);
          charge();
          env[c->slot] = std::move(v);
          return;
        }
        case Command::Kind::seq:
          exec(*c->first, env);
          c = c->second.get();
          continue;
        case Command::Kind::while_:
          for (;;) {
            charge();
            if (value(*c->expr, env).node->is_nil()) break;
            exec(*c->first, env);
          }
          return;
        case Command::Kind::if_: {
          charge();
          bool truth = !value(*c->expr, env).node->is_nil();
          c = truth ? c->first.get() : c->second.get();
          continue;
        }
      }
    }
  }

  // A value during expression evaluation: `node` points into the tree kept
  // alive by `owner`, or into env/program constants when `owner` is empty.
  // Env does not change while an expression is evaluated.
  struct Val {
    const Node* node;
    SExpr owner;
  };

  static SExpr own(Val&& v) { return v.owner.get() == v.node ? std::move(v.owner) : SExpr(v.node); }

  SExpr eval(const Expr& e, std::vector<SExpr>& env) { return own(value(e, env)); }

  Val value(const Expr& e, std::vector<SExpr>& env) {
    switch (e.kind) {
      case Expr::Kind::var:
        charge();
        return {env[e.slot].get(), {}};
      case Expr::Kind::quote:
        charge();
        return {e.constant.get(), {}};
      case Expr::Kind::hd: {
        Val v = value(*e.lhs, env);
        charge();
        v.node = v.node->is_pair() ? v.node->head().get() : nil().get();
        return v;
      }
      case Expr::Kind::tl: {
        Val v = value(*e.lhs, env);
        charge();
        v.node = v.node->is_pair() ? v.node->tail().get() : nil().get();
        return v;
      }
      case Expr::Kind::cons: {
        Val a = value(*e.lhs, env);
        Val b = value(*e.rhs, env);
        charge();
        SExpr p = srtkit::pair(own(std::move(a)), own(std::move(b)));
        const Node* n = p.get();
        return {n, std::move(p)};
      }
      case Expr::Kind::eq: {
        Val a = value(*e.lhs, env);
        Val b = value(*e.rhs, env);
        charge();
        return {node_equal(a.node, b.node) ? true_atom().get() : nil().get(), {}};
      }
      case Expr::Kind::is_atom: {
        Val v = value(*e.lhs, env);
        charge();
        return {v.node->is_atom() ? true_atom().get() : nil().get(), {}};
      }
      case Expr::Kind::self_ref:
        if (mode_ != Mode::reflective) throw RuntimeFault{"(*) evaluated in plain mode"};
        charge();
        return {current_->encoding().get(), {}};
      case Expr::Kind::univ: {
        SExpr out = univ_call(e, env);
        const Node* n = out.get();
        return {n, std::move(out)};
      }
    }
    throw RuntimeFault{"corrupt expression"};
  }

  static bool node_equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a->is_pair() != b->is_pair()) return false;
    if (!a->is_pair()) return a->name() == b->name();
    return equal(SExpr(a), SExpr(b));
  }

  SExpr univ_call(const Expr& e, std::vector<SExpr>& env) {
    if (mode_ != Mode::reflective) throw RuntimeFault{"univ call in plain mode"};
    SExpr text = eval(*e.lhs, env);
    SExpr datum = eval(*e.rhs, env);
    charge();
    const Program& inner = decoded(text);
    if (inner.arity() > 1) throw RuntimeFault{"univ call on a program with more than one input"};
    if (++depth_ > max_depth) throw RuntimeFault{"univ calls nested too deeply"};
    const Program* caller = current_;
    current_ = &inner;
    SExpr out = run(inner, std::span<const SExpr>(&datum, 1));
    current_ = caller;
    --depth_;
    return out;
  }

  const Program& decoded(const SExpr& text) {
    auto it = cache_.find(text.get());
    if (it != cache_.end()) return *it->second.second;
    std::shared_ptr<const Program> p;
    try {
      p = std::make_shared<const Program>(decode(text));
    } catch (const DecodeError& err) {
      throw RuntimeFault{std::string("univ call on a non-program: ") + err.what()};
    }
    return *cache_.emplace(text.get(), std::make_pair(text, std::move(p))).first->second.second;
  }

  static constexpr int max_depth = 2000;

  const Program* current_;  // the program whose text (*) denotes
  std::uint64_t fuel_;
  Mode mode_;
  std::uint64_t steps_ = 0;
  int depth_ = 0;
  // Keyed by node identity; the SExpr keeps the key alive.
  std::unordered_map<const Node*, std::pair<SExpr, std::shared_ptr<const Program>>> cache_;
};

}  // namespace detail

/// Runs `p` on `args` with at most `fuel` steps. Unassigned variables read
/// as (). Cost: 1 per assignment, operator, variable/constant/(*) access,
/// while/if test event, univ dispatch, and the final read of the output.
inline RunResult run(const Program& p, std::span<const SExpr> args, std::uint64_t fuel,
                     Mode mode = Mode::plain) {
  if (args.size() != p.arity())
    throw std::invalid_argument("program expects " + std::to_string(p.arity()) +
                                " arguments, got " + std::to_string(args.size()));
  if (fuel == 0) throw std::invalid_argument("fuel must be positive");
  detail::Machine m(p, fuel, mode);
  RunResult r;
  try {
    r.value = m.run(p, args);
    r.status = Status::halted;
  } catch (const detail::FuelOut&) {
    r.status = Status::fuel_exhausted;
  } catch (const detail::RuntimeFault& f) {
    r.status = Status::runtime_error;
    r.detail = f.detail;
  }
  r.steps = m.steps();
  return r;
}

inline RunResult run(const Program& p, std::initializer_list<SExpr> args, std::uint64_t fuel,
                     Mode mode = Mode::plain) {
  return run(p, std::span<const SExpr>(args.begin(), args.size()), fuel, mode);
}

inline constexpr std::uint64_t default_fuel = 10'000'000;

}  // namespace srtkit

#endif  // SRTKIT_FLOWCHART_HPP
