#ifndef SRTKIT_SRT_HPP
#define SRTKIT_SRT_HPP

// Fixpoints of 2-input flowchart programs: given p, build p* with
// [[p*]](d) = [[p]](p*, d).
//
// kleene_fixpoint goes through the specializer:
//   p~ = ((q d) (; %pgm:=q; %s:=q; C_spec; q:=%outpgm; C_p) out)
//   p* = s11(p~, p~)
// moss_fixpoint goes through code generation and self-application:
//   q^ = diag | assemble_p,   p* = [[q^]](q^)
// where [[q^]](r) reads d, computes [[r]](r) and runs C_p on both.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srtkit/flowchart.hpp"
#include "srtkit/selfint.hpp"
#include "srtkit/specializer.hpp"

namespace srtkit {

namespace detail {

inline void require_arity(const Program& p, std::size_t n, const char* who) {
  if (p.arity() != n)
    throw std::invalid_argument(std::string(who) + ": program must have " + std::to_string(n) +
                                " input(s), has " + std::to_string(p.arity()));
}

inline void require_unreserved(const Program& p, const char* who) {
  for (const auto& v : p.variables())
    if (is_reserved_name(v))
      throw std::invalid_argument(std::string(who) + ": variable '" + v +
                                  "' uses the reserved '%' prefix");
}

inline std::string reserved(std::string_view x) { return std::string(1, reserved_prefix) + std::string(x); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Kleene

/// The intermediate program p~ with [[p~]](q, x) = [[p]]([[s11]](q, q), x).
inline Program kleene_intermediate(const Program& p) {
  detail::require_arity(p, 2, "kleene_fixpoint");
  detail::require_unreserved(p, "kleene_fixpoint");
  using namespace syn;
  const std::string& q = p.inputs()[0];
  auto r = [](const char* x) { return detail::reserved(x); };
  SExpr body = seq({
      assign(r("pgm"), var(q)),
      assign(r("s"), var(q)),
      specializer_body(r),
      seq2(assign(q, var(r("outpgm"))), p.body_encoding()),
  });
  const SExpr& enc = p.encoding();
  return decode(list({head(enc), body, head(tail(tail(enc)))}));
}

inline Program kleene_fixpoint(const Program& p) {
  Program tilde = kleene_intermediate(p);
  return specialize(tilde, encode(tilde));
}

// ---------------------------------------------------------------------------
// Reflective fixpoint: p* = ((d) (; (:= q (*)) C_p) out), no self-application.

inline Program reflective_fixpoint(const Program& p) {
  detail::require_arity(p, 2, "reflective_fixpoint");
  const SExpr& enc = p.encoding();
  SExpr body = syn::seq2(syn::assign(p.inputs()[0], syn::self_ref()), p.body_encoding());
  return decode(list({tail(head(enc)), body, head(tail(tail(enc)))}));
}

// ---------------------------------------------------------------------------
// Code generation building blocks

/// [[write]](x) = (() (:= out (QUOTE x)) out)
inline const Program& write_program() {
  static const Program p = [] {
    using namespace syn;
    SExpr body = assign(
        "out", list_of({quote(nil()),
                        list_of({quote(sym(tag::assign)), quote(sym("out")),
                                 list_of({quote(sym(tag::quote)), var("x")})}),
                        quote(sym("out"))}));
    return decode(program({"x"}, body, "out"));
  }();
  return p;
}

namespace detail {

/// Body of diag with every variable name passed through `name`.
template <typename Name>
SExpr diag_body(Name&& name) {
  using namespace syn;
  auto v = [&](const char* x) { return var(name(x)); };
  return seq({
      assign(name("inputvar"), hd(hd(v("r")))),
      assign(name("C"), hd(tl(v("r")))),
      assign(name("outputvar"), hd(tl(tl(v("r"))))),
      assign(name("initialise"),
             list_of({quote(sym(tag::assign)), v("inputvar"), list_of({quote(sym(tag::quote)), v("r")})})),
      assign(name("body"), list_of({quote(sym(tag::seq)), v("initialise"), v("C")})),
      assign(name("outpgm"), list_of({tl(hd(v("r"))), v("body"), v("outputvar")})),
  });
}

template <typename Name>
SExpr diag_encoding(Name&& name) {
  return list({list({atom(name("r"))}), diag_body(name), atom(name("outpgm"))});
}

}  // namespace detail

/// [[diag]](r) = (() (; (:= x (QUOTE r)) C_r) out) for r = ((x) C_r out).
/// This is the specializer program with its static input tied to r.
inline const Program& diag_program() {
  static const Program p =
      decode(detail::diag_encoding([](const char* x) { return std::string(x); }));
  return p;
}

/// Sequential composition of 1-input programs: [[p | q]](x) = [[q]]([[p]](x)).
/// q's variables other than its input are moved to a fresh namespace and its
/// input is unified with p's output.
inline Program compose(const Program& p, const Program& q) {
  detail::require_arity(p, 1, "compose");
  detail::require_arity(q, 1, "compose");
  std::set<std::string> taken = variable_set(p);
  taken.insert(q.variables().begin(), q.variables().end());
  std::string prefix;
  for (int k = 0;; ++k) {
    prefix = detail::reserved("c" + std::to_string(k) + ".");
    bool clash = false;
    for (const auto& v : taken)
      if (v.compare(0, prefix.size(), prefix) == 0) clash = true;
    if (!clash) break;
  }
  const std::string& q_in = q.inputs()[0];
  const std::string& joint = p.output();
  SExpr renamed = rename_variables(encode(q), [&](const std::string& v) {
    return v == q_in ? joint : prefix + v;
  });
  SExpr body = syn::seq2(p.body_encoding(), head(tail(renamed)));
  return decode(list({head(encode(p)), body, head(tail(tail(renamed)))}));
}

// ---------------------------------------------------------------------------
// Moss

namespace detail {

inline const std::string& moss_din() {
  static const std::string n = reserved("fix.d");
  return n;
}
inline const std::string& moss_save() {
  static const std::string n = reserved("fix.save");
  return n;
}

/// 1-input TINY program turning d_r = (() (; (:= x 'r) C_r) out_r) into
///   ((%fix.d) (; (:= %fix.save %fix.d)
///              (; (; (:= x 'r) C_r)
///              (; (:= q out_r)
///                 (; (:= d %fix.save) C_p)))) out_p)
/// The constant parts come in as quoted code, the rest is read off d_r.
inline Program moss_assembler(const Program& p) {
  using namespace syn;
  const std::string& q = p.inputs()[0];
  const std::string& d = p.inputs()[1];
  SExpr save = assign(moss_save(), var(moss_din()));
  SExpr run_p = seq2(assign(d, var(moss_save())), p.body_encoding());
  SExpr body = assign(
      "code",
      list_of({quote(list({sym(moss_din())})),
               list_of({quote(sym(tag::seq)), quote(save),
                        list_of({quote(sym(tag::seq)), hd(tl(var("dr"))),
                                 list_of({quote(sym(tag::seq)),
                                          list_of({quote(sym(tag::assign)), quote(sym(q)),
                                                   hd(tl(tl(var("dr"))))}),
                                          quote(run_p)})})}),
               quote(sym(p.output()))}));
  return decode(prefix_variables(program({"dr"}, body, "code"), reserved("asm.")));
}

}  // namespace detail

/// q^ with [[ [[q^]](r) ]](d) = [[p]]([[r]](r), d), for r whose variables
/// stay clear of p's and of the %fix. names.
inline Program moss_qhat(const Program& p) {
  detail::require_arity(p, 2, "moss_qhat");
  detail::require_unreserved(p, "moss_qhat");
  Program diag = decode(detail::diag_encoding([](const char* x) { return detail::reserved("g." + std::string(x)); }));
  return compose(diag, detail::moss_assembler(p));
}

inline Program moss_fixpoint(const Program& p, std::uint64_t fuel = default_fuel) {
  Program qhat = moss_qhat(p);
  RunResult r = run(qhat, {encode(qhat)}, fuel);
  if (!r.halted()) throw std::runtime_error("moss_fixpoint: [[q^]](q^) did not halt");
  return decode(*r.value);
}

// ---------------------------------------------------------------------------
// Demo programs

enum class DemoName {
  proj1,
  proj2,
  self_recognizer,
  univ_corner,
  factorial_univ,
  factorial_reflective,
  interchange,
};

inline constexpr DemoName all_demos[] = {
    DemoName::proj1,          DemoName::proj2,
    DemoName::self_recognizer, DemoName::univ_corner,
    DemoName::factorial_univ, DemoName::factorial_reflective,
    DemoName::interchange,
};

inline const char* to_string(DemoName n) noexcept {
  switch (n) {
    case DemoName::proj1: return "proj1";
    case DemoName::proj2: return "proj2";
    case DemoName::self_recognizer: return "self_recognizer";
    case DemoName::univ_corner: return "univ_corner";
    case DemoName::factorial_univ: return "factorial_univ";
    case DemoName::factorial_reflective: return "factorial_reflective";
    case DemoName::interchange: return "interchange";
  }
  return "?";
}

/// Accepts both `self_recognizer` and `self-recognizer` spellings.
inline std::optional<DemoName> demo_from_string(std::string_view s) {
  std::string norm(s);
  for (char& c : norm)
    if (c == '-') c = '_';
  for (DemoName n : all_demos)
    if (norm == to_string(n)) return n;
  return std::nullopt;
}

namespace detail {

/// U inlined with its variables under `u.`, reading the program from
/// `prog_expr` and the datum from `data_expr`, result left in `into`.
inline SExpr inline_univ(SExpr prog_expr, SExpr data_expr, const std::string& into) {
  using namespace syn;
  SExpr u = prefix_variables(srtkit::univ_encoding(), "u.");
  return seq({assign("u.prog", std::move(prog_expr)), assign("u.data", std::move(data_expr)),
              head(tail(u)), assign(into, var("u.result"))});
}

/// out := d * r, where d is a canonical numeral: one cons of r per unit of d.
inline SExpr multiply_into_out() {
  using namespace syn;
  return seq({
      assign("out", quote(nil())),
      assign("k", var("d")),
      while_(var("k"), seq({assign("out", cons(var("r"), var("out"))), assign("k", tl(var("k")))})),
  });
}

inline SExpr factorial_body(SExpr recursive_call) {
  using namespace syn;
  return if_(var("d"), seq({std::move(recursive_call), multiply_into_out()}),
             assign("out", quote(numeral(1))));
}

}  // namespace detail

/// Base programs p(q, d). q receives the program text when used through a
/// fixpoint construction.
inline Program demo_program(DemoName name) {
  using namespace syn;
  switch (name) {
    case DemoName::proj1:
      return decode(program({"q", "d"}, assign("out", var("q")), "out"));
    case DemoName::proj2:
      return decode(program({"q", "d"}, assign("out", var("d")), "out"));
    case DemoName::self_recognizer:
      return decode(program({"q", "d"},
                            if_(eq(var("d"), var("q")), assign("out", quote(sym("1"))),
                                assign("out", quote(sym("0")))),
                            "out"));
    case DemoName::univ_corner:
      return univ_program();
    case DemoName::factorial_univ:
      // if d = 0 then 1 else d * univ(q, d-1), univ being U inlined.
      return decode(program(
          {"q", "d"}, detail::factorial_body(detail::inline_univ(var("q"), tl(var("d")), "r")),
          "out"));
    case DemoName::factorial_reflective:
      // Same recursion through the native univ call.
      return decode(program(
          {"q", "d"}, detail::factorial_body(assign("r", univ(var("q"), tl(var("d"))))), "out"));
    case DemoName::interchange:
      // p(q, d) = univ(d, q)
      return decode(program({"q", "d"}, detail::inline_univ(var("d"), var("q"), "out"), "out"));
  }
  throw std::invalid_argument("unknown demo");
}

/// Modes the demo's programs need to run in.
inline Mode demo_mode(DemoName name) {
  return name == DemoName::factorial_reflective ? Mode::reflective : Mode::plain;
}

}  // namespace srtkit

#endif  // SRTKIT_SRT_HPP
