#ifndef SRTKIT_SPECIALIZER_HPP
#define SRTKIT_SPECIALIZER_HPP

// First-argument specialization (S-1-1), both as a meta-level operation and
// as a straight-line flowchart program, plus a dead-code post-pass.

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "srtkit/flowchart.hpp"

namespace srtkit {

/// Freezes the first input of `p` to `s`:
///   ((q d...) C out)  ->  ((d...) (; (:= q (QUOTE s)) C) out)
/// The body and `s` are referenced, not copied.
inline Program specialize(const Program& p, const SExpr& s) {
  if (p.arity() == 0) throw std::invalid_argument("specialize: program has no inputs");
  const SExpr& enc = p.encoding();
  const SExpr& inputs = head(enc);
  SExpr init = list({atom(std::string(tag::assign)), head(inputs), syn::quote(s)});
  SExpr body = list({atom(std::string(tag::seq)), std::move(init), p.body_encoding()});
  return decode(list({tail(inputs), std::move(body), head(tail(tail(enc)))}));
}

/// Body of the specializer program with every variable name passed through
/// `name`. Reads `pgm` and `s`, leaves the residual program in `outpgm`.
template <typename Name>
SExpr specializer_body(Name&& name) {
  using namespace syn;
  auto v = [&](const char* x) { return var(name(x)); };
  return seq({
      assign(name("inputvar"), hd(hd(v("pgm")))),
      assign(name("C"), hd(tl(v("pgm")))),
      assign(name("outputvar"), hd(tl(tl(v("pgm"))))),
      assign(name("initialise"),
             list_of({quote(sym(tag::assign)), v("inputvar"), list_of({quote(sym(tag::quote)), v("s")})})),
      assign(name("body"), list_of({quote(sym(tag::seq)), v("initialise"), v("C")})),
      assign(name("outpgm"), list_of({tl(hd(v("pgm"))), v("body"), v("outputvar")})),
  });
}

inline SExpr s11_encoding() {
  auto same = [](const char* x) { return std::string(x); };
  return list({list({atom("pgm"), atom("s")}), specializer_body(same), atom("outpgm")});
}

/// The TINY specializer program: [[s11]](p, s) = specialize(p, s).
inline const Program& s11_program() {
  static const Program p = decode(s11_encoding());
  return p;
}

// ---------------------------------------------------------------------------
// Dead-code elimination

namespace detail {

inline void expr_reads(const SExpr& e, std::set<std::string>& out) {
  if (e->is_atom()) {
    out.insert(e->name());
    return;
  }
  const std::string& t = head(e)->name();
  if (t == tag::quote || t == tag::self) return;
  for (const SExpr& arg : list_items(tail(e))) expr_reads(arg, out);
}

inline bool expr_has_univ(const SExpr& e) {
  if (e->is_atom()) return false;
  const std::string& t = head(e)->name();
  if (t == tag::quote) return false;
  if (t == tag::univ) return true;
  for (const SExpr& arg : list_items(tail(e)))
    if (expr_has_univ(arg)) return true;
  return false;
}

inline bool uses_self_ref(const SExpr& c) {
  std::vector<SExpr> stack{c};
  while (!stack.empty()) {
    SExpr n = stack.back();
    stack.pop_back();
    if (!n->is_pair()) continue;
    if (is_atom_named(head(n), tag::quote)) continue;
    if (is_atom_named(head(n), tag::self)) return true;
    for (const SExpr& item : list_items(n)) stack.push_back(item);
  }
  return false;
}

inline void command_reads(const SExpr& c, std::set<std::string>& out) {
  const std::string& t = head(c)->name();
  if (t == tag::assign) {
    expr_reads(head(tail(tail(c))), out);
  } else if (t == tag::seq) {
    command_reads(head(tail(c)), out);
    command_reads(head(tail(tail(c))), out);
  } else if (t == tag::while_) {
    expr_reads(head(tail(c)), out);
    command_reads(head(tail(tail(c))), out);
  } else {
    expr_reads(head(tail(c)), out);
    command_reads(head(tail(tail(c))), out);
    command_reads(head(tail(tail(tail(c)))), out);
  }
}

/// Backward pass. `live` holds the variables live after `c` on entry and
/// before it on return. Returns nullptr when the whole command is dead.
/// `noop` fills a branch that became empty.
inline SExpr prune(const SExpr& c, std::set<std::string>& live, const SExpr& noop) {
  const std::string& t = head(c)->name();
  if (t == tag::assign) {
    const std::string& target = head(tail(c))->name();
    const SExpr& e = head(tail(tail(c)));
    if (!live.count(target) && !expr_has_univ(e)) return nullptr;
    live.erase(target);
    expr_reads(e, live);
    return c;
  }
  if (t == tag::seq) {
    SExpr second = prune(head(tail(tail(c))), live, noop);
    SExpr first = prune(head(tail(c)), live, noop);
    if (!first) return second;
    if (!second) return first;
    if (first == head(tail(c)) && second == head(tail(tail(c)))) return c;
    return syn::seq2(first, second);
  }
  const SExpr& test = head(tail(c));
  if (t == tag::if_) {
    std::set<std::string> live_then = live, live_else = live;
    SExpr then_c = prune(head(tail(tail(c))), live_then, noop);
    SExpr else_c = prune(head(tail(tail(tail(c)))), live_else, noop);
    if (!then_c && !else_c && !expr_has_univ(test)) return nullptr;
    if (!then_c) then_c = noop;
    if (!else_c) else_c = noop;
    live = std::move(live_then);
    live.insert(live_else.begin(), live_else.end());
    command_reads(then_c, live);
    command_reads(else_c, live);
    expr_reads(test, live);
    if (then_c == head(tail(tail(c))) && else_c == head(tail(tail(tail(c))))) return c;
    return syn::if_(test, then_c, else_c);
  }
  // while: anything read in the loop is live throughout it.
  std::set<std::string> loop_live = live;
  expr_reads(test, loop_live);
  command_reads(head(tail(tail(c))), loop_live);
  std::set<std::string> inner = loop_live;
  SExpr body = prune(head(tail(tail(c))), inner, noop);
  if (!body) body = noop;
  live = std::move(loop_live);
  if (body == head(tail(tail(c)))) return c;
  return syn::while_(test, body);
}

}  // namespace detail

/// Removes assignments whose values can never reach the output variable.
/// Programs using (*) are returned unchanged, since their own text is
/// observable. Assignments that call univ are kept.
inline Program eliminate_dead_code(const Program& p) {
  const SExpr& enc = p.encoding();
  if (detail::uses_self_ref(p.body_encoding())) return p;

  const SExpr noop = syn::assign(p.output(), syn::var(p.output()));
  std::set<std::string> live{p.output()};
  SExpr body = detail::prune(p.body_encoding(), live, noop);
  if (!body) body = noop;
  if (body == p.body_encoding()) return p;
  return decode(list({head(enc), body, head(tail(tail(enc)))}));
}

}  // namespace srtkit

#endif  // SRTKIT_SPECIALIZER_HPP
