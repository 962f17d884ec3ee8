#ifndef SRTKIT_SELFINT_HPP
#define SRTKIT_SELFINT_HPP

// A universal program for the (non-reflective) flowchart language, written
// in that language, together with interpretation-overhead measurement and
// the three Futamura projections over the TINY specializer.
//
// U reads (prog data) where prog is an encoded 1-input program. Its state:
//   env  association list ((name . value) ...), most recently assigned first
//   cs   stack of pending commands
//   es   stack of pending expressions and operator markers
//   vs   value stack
// The outer loop pops a command; assignments, tests and loop conditions run
// the inner loop over es to leave one value on vs. Markers are lists whose
// tag starts with '#', e.g. (#hd), (#cons); source tags never do. U's own
// cost per interpreted step is what the nested-interpretation experiments
// measure, so the hot paths are unrolled.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srtkit/flowchart.hpp"
#include "srtkit/specializer.hpp"

namespace srtkit {

namespace detail {

/// Dispatch order of U's expression tags, most frequent first.
inline constexpr const char* univ_expr_order[] = {
    "hd", "QUOTE", "tl", "=", "#=", "cons", "#cons", "#hd", "#tl", "atom?", "#atom?",
};

inline constexpr int lookup_unrolled = 4;
inline constexpr int update_unrolled = 3;

/// U with variable names passed through `name`.
template <typename Name>
SExpr univ_encoding(Name&& name) {
  using namespace syn;
  auto v = [&](const char* x) { return var(name(x)); };
  auto set = [&](const char* x, SExpr e) { return assign(name(x), std::move(e)); };
  auto k = [](const char* text) { return quote(parse(text)); };
  auto arg1 = [&](const char* x) { return hd(tl(v(x))); };
  auto arg2 = [&](const char* x) { return hd(tl(tl(v(x)))); };
  auto arg3 = [&](const char* x) { return hd(tl(tl(tl(v(x))))); };
  auto nothing = [&] { return set("tag", v("tag")); };

  // vs := cons (f (hd vs)) (tl vs)
  auto apply1 = [&](SExpr (*op)(SExpr)) {
    return set("vs", cons(op(hd(v("vs"))), tl(v("vs"))));
  };
  // vs := cons (f (hd tl vs) (hd vs)) (tl tl vs)
  auto apply2 = [&](SExpr (*op)(SExpr, SExpr)) {
    return set("vs", cons(op(hd(tl(v("vs"))), hd(v("vs"))), tl(tl(v("vs")))));
  };

  auto env_at = [&](int depth) {
    SExpr e = v("env");
    for (int i = 0; i < depth; ++i) e = tl(std::move(e));
    return e;
  };

  // Pushes f(value bound to the variable in `ex`), the value being () when
  // unbound. The first bindings are checked without a loop.
  auto lookup_with = [&](SExpr (*f)(SExpr)) {
    SExpr out = seq({
        set("vs", cons(f(quote(nil())), v("vs"))),
        set("e", env_at(lookup_unrolled)),
        while_(v("e"), if_(eq(hd(hd(v("e"))), v("ex")),
                           seq({set("vs", cons(f(tl(hd(v("e")))), tl(v("vs")))), set("e", quote(nil()))}),
                           set("e", tl(v("e"))))),
    });
    for (int d = lookup_unrolled - 1; d >= 0; --d)
      out = if_(eq(hd(hd(env_at(d))), v("ex")), set("vs", cons(f(tl(hd(env_at(d)))), v("vs"))), out);
    return out;
  };
  SExpr lookup = lookup_with([](SExpr e) { return e; });

  // (hd x) and (tl x) with x a variable are handled in one item.
  auto unary = [&](SExpr (*op)(SExpr), const char* marker) {
    return if_(is_atom(arg1("ex")), seq({set("ex", arg1("ex")), lookup_with(op)}),
               set("es", cons(arg1("ex"), cons(k(marker), v("es")))));
  };

  std::vector<std::pair<std::string, SExpr>> cases = {
      {"QUOTE", set("vs", cons(arg1("ex"), v("vs")))},
      {"#hd", apply1(&syn::hd)},
      {"hd", unary(&syn::hd, "(#hd)")},
      {"#tl", apply1(&syn::tl)},
      {"tl", unary(&syn::tl, "(#tl)")},
      {"#cons", apply2(&syn::cons)},
      {"cons", set("es", cons(arg1("ex"), cons(arg2("ex"), cons(k("(#cons)"), v("es")))))},
      {"#=", apply2(&syn::eq)},
      {"=", set("es", cons(arg1("ex"), cons(arg2("ex"), cons(k("(#=)"), v("es")))))},
      {"#atom?", apply1(&syn::is_atom)},
      {"atom?", set("es", cons(arg1("ex"), cons(k("(#atom?)"), v("es"))))},
  };
  auto handler = [&](std::string_view t) -> SExpr {
    for (auto& c : cases)
      if (c.first == t) return c.second;
    throw std::logic_error("univ_encoding: no handler");
  };
  SExpr dispatch = nothing();  // unknown tag: skip the item
  for (auto t = std::rbegin(univ_expr_order); t != std::rend(univ_expr_order); ++t)
    dispatch = if_(eq(v("tag"), k(*t)), handler(*t), dispatch);

  // Evaluates the expression `first` onto vs.
  auto eval = [&](SExpr first) {
    return seq({
        set("es", cons(std::move(first), quote(nil()))),
        while_(v("es"), seq({
                            set("ex", hd(v("es"))),
                            set("es", tl(v("es"))),
                            if_(is_atom(v("ex")), lookup, seq({set("tag", hd(v("ex"))), dispatch})),
                        })),
    });
  };

  // Binds x to the top value, moving the binding to the front of env.
  SExpr bind = cons(v("x"), hd(v("vs")));
  SExpr update = seq({
      set("pre", quote(nil())),
      set("rest", quote(nil())),
      set("e", v("env")),
      while_(v("e"), if_(eq(hd(hd(v("e"))), v("x")),
                         seq({set("rest", tl(v("e"))), set("e", quote(nil()))}),
                         seq({set("pre", cons(hd(v("e")), v("pre"))), set("e", tl(v("e")))}))),
      set("env", v("rest")),
      while_(v("pre"), seq({set("env", cons(hd(v("pre")), v("env"))), set("pre", tl(v("pre")))})),
      set("env", cons(bind, v("env"))),
  });
  for (int d = update_unrolled - 1; d >= 0; --d) {
    // env := bind : env[0..d-1] ++ tl^(d+1) env
    SExpr rebuilt = env_at(d + 1);
    for (int i = d - 1; i >= 0; --i) rebuilt = cons(hd(env_at(i)), std::move(rebuilt));
    update = if_(eq(hd(hd(env_at(d))), v("x")), set("env", cons(bind, std::move(rebuilt))), update);
  }
  update = seq({set("x", arg1("it")), update});

  SExpr command = if_(
      eq(v("tag"), k(":=")), seq({eval(arg2("it")), update, set("vs", tl(v("vs")))}),
      if_(eq(v("tag"), k(";")), set("cs", cons(arg1("it"), cons(arg2("it"), v("cs")))),
          if_(eq(v("tag"), k("if")),
              seq({eval(arg1("it")),
                   if_(hd(v("vs")), set("cs", cons(arg2("it"), v("cs"))),
                       set("cs", cons(arg3("it"), v("cs")))),
                   set("vs", tl(v("vs")))}),
              if_(eq(v("tag"), k("while")),
                  seq({eval(arg1("it")),
                       if_(hd(v("vs")), set("cs", cons(arg2("it"), cons(v("it"), v("cs")))), nothing()),
                       set("vs", tl(v("vs")))}),
                  nothing()))));

  SExpr body = seq({
      set("env", cons(cons(hd(hd(v("prog"))), v("data")), quote(nil()))),
      set("cs", cons(arg1("prog"), quote(nil()))),
      set("vs", quote(nil())),
      while_(v("cs"), seq({
                          set("it", hd(v("cs"))),
                          set("cs", tl(v("cs"))),
                          set("tag", hd(v("it"))),
                          command,
                      })),
      set("ex", arg2("prog")),
      lookup,
      set("result", hd(v("vs"))),
  });
  return list({list({var(name("prog")), var(name("data"))}), body, var(name("result"))});
}

}  // namespace detail

inline SExpr univ_encoding() {
  return detail::univ_encoding([](const char* x) { return std::string(x); });
}

/// The universal program: [[U]](encode(p), d) = [[p]](d) for 1-input,
/// non-reflective p.
inline const Program& univ_program() {
  static const Program p = decode(univ_encoding());
  return p;
}

/// Gives a 0-input program one ignored input so it can be interpreted by U.
inline Program with_ignored_input(const Program& p) {
  if (p.arity() != 0) return p;
  const SExpr& enc = p.encoding();
  return decode(list({list({atom("%ignored")}), head(tail(enc)), head(tail(tail(enc)))}));
}

// ---------------------------------------------------------------------------
// Overhead

struct OverheadRow {
  std::uint64_t input_size = 0;  // tree size of the input
  std::uint64_t time_p = 0;
  std::uint64_t time_univ = 0;
  double ratio = 0.0;
  bool complete = true;  // both runs halted
};

struct OverheadReport {
  std::string program_id;
  std::vector<OverheadRow> rows;
  bool partial = false;   // some run did not halt under the fuel
  bool class2 = false;    // max ratio / min ratio <= stability bound
  double spread = 0.0;    // max ratio / min ratio
};

inline constexpr double overhead_stability_bound = 1.2;

inline OverheadReport measure_overhead(const std::string& id, const Program& p,
                                       const std::vector<SExpr>& inputs,
                                       std::uint64_t fuel = default_fuel) {
  if (p.arity() != 1) throw std::invalid_argument("measure_overhead: program must have one input");
  OverheadReport rep;
  rep.program_id = id;
  const Program& u = univ_program();
  for (const SExpr& d : inputs) {
    OverheadRow row;
    row.input_size = tree_size(d);
    RunResult direct = run(p, {d}, fuel);
    RunResult interp = run(u, {encode(p), d}, fuel);
    row.time_p = direct.steps;
    row.time_univ = interp.steps;
    row.complete = direct.halted() && interp.halted();
    row.ratio = row.time_p ? static_cast<double>(row.time_univ) / static_cast<double>(row.time_p) : 0.0;
    if (!row.complete) rep.partial = true;
    rep.rows.push_back(row);
  }
  double lo = 0, hi = 0;
  bool first = true;
  for (const auto& r : rep.rows) {
    if (!r.complete) continue;
    lo = first ? r.ratio : std::min(lo, r.ratio);
    hi = first ? r.ratio : std::max(hi, r.ratio);
    first = false;
  }
  rep.spread = (first || lo <= 0) ? 0.0 : hi / lo;
  rep.class2 = !first && !rep.partial && rep.spread <= overhead_stability_bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Futamura projections

enum class FutamuraStage { target, compiler, cogen };

/// [[s11]](a, b) run as a flowchart program, decoded.
inline Program run_specializer(const SExpr& program, const SExpr& static_input,
                               std::uint64_t fuel = default_fuel) {
  RunResult r = run(s11_program(), {program, static_input}, fuel);
  if (!r.halted()) throw std::runtime_error("specializer run did not halt");
  return decode(*r.value);
}

///   target   = [[s11]](U, source)
///   compiler = [[s11]](s11, U)
///   cogen    = [[s11]](s11, s11)
inline Program futamura(FutamuraStage stage, const std::optional<Program>& source = std::nullopt) {
  switch (stage) {
    case FutamuraStage::target:
      if (!source) throw std::invalid_argument("futamura target: source program required");
      return run_specializer(encode(univ_program()), encode(*source));
    case FutamuraStage::compiler:
      return run_specializer(encode(s11_program()), encode(univ_program()));
    case FutamuraStage::cogen:
      return run_specializer(encode(s11_program()), encode(s11_program()));
  }
  throw std::invalid_argument("futamura: unknown stage");
}

}  // namespace srtkit

#endif  // SRTKIT_SELFINT_HPP
