#ifndef SRTKIT_RANDOM_PROGRAMS_HPP
#define SRTKIT_RANDOM_PROGRAMS_HPP

// Seeded generators for property tests and experiments.
//
// TINY programs: 1 to 4 assignments over the pool {x, y, z, w}; expression
// depth at most 5; constants of tree size at most 7. Loop programs add one
// while or if around TINY code, and the suites mix in loops that never stop.
// Draws use mt19937_64 and plain modulo so a seed means the same program on
// every platform.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "srtkit/flowchart.hpp"
#include "srtkit/sexpr.hpp"
#include "srtkit/trm.hpp"

namespace srtkit {

class ProgramGenerator {
public:
  static constexpr std::array<const char*, 4> pool = {"x", "y", "z", "w"};
  static constexpr int max_expr_depth = 5;
  static constexpr std::uint64_t max_constant_size = 7;

  explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return rng_() % n; }
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

  const char* variable() { return pool[below(pool.size())]; }

  /// Random tree with at most `budget` nodes over atoms a, b, 1.
  SExpr datum(std::uint64_t budget) {
    static const std::array<const char*, 3> atoms = {"a", "b", "1"};
    if (budget < 3 || chance(1, 3)) {
      if (chance(1, 4)) return nil();
      return atom(atoms[below(atoms.size())]);
    }
    std::uint64_t left = 1 + below(budget - 2);
    return pair(datum(left), datum(budget - 1 - left));
  }

  SExpr constant() { return datum(1 + below(max_constant_size)); }

  SExpr expr(int depth = max_expr_depth) {
    if (depth <= 1 || chance(2, 5)) {
      return chance(3, 4) ? syn::var(variable()) : syn::quote(constant());
    }
    switch (below(5)) {
      case 0: return syn::hd(expr(depth - 1));
      case 1: return syn::tl(expr(depth - 1));
      case 2: return syn::cons(expr(depth - 1), expr(depth - 1));
      case 3: return syn::eq(expr(depth - 1), expr(depth - 1));
      default: return syn::is_atom(expr(depth - 1));
    }
  }

  SExpr tiny_body() {
    std::vector<SExpr> cmds;
    std::uint64_t n = 1 + below(4);
    for (std::uint64_t i = 0; i < n; ++i) cmds.push_back(syn::assign(variable(), expr()));
    return syn::seq(cmds);
  }

  /// Straight-line program with `arity` inputs drawn from the pool.
  Program tiny(std::size_t arity) {
    std::vector<SExpr> inputs;
    for (std::size_t i = 0; i < arity; ++i) inputs.push_back(atom(pool[i]));
    return decode(list({list_from(inputs), tiny_body(), atom(variable())}));
  }

  /// 1-input program with a loop or branch. Shapes:
  ///   walk:    z := (); while x { body; z := cons (hd x) z; x := tl x }
  ///   count:   while y { ... } over a constant list (input-independent)
  ///   branch:  if e then body else body
  ///   forever: while (QUOTE 1) { body }
  ///   stuck:   while x { body' } where body' never changes x
  Program looping() {
    using namespace syn;
    SExpr body;
    switch (below(5)) {
      case 0:
        body = seq({assign("z", quote(nil())),
                    while_(var("x"), seq({tiny_body(), assign("z", cons(hd(var("x")), var("z"))),
                                          assign("x", tl(var("x")))}))});
        break;
      case 1:
        body = seq({assign("y", quote(numeral(1 + below(6)))),
                    while_(var("y"), seq({tiny_body(), assign("y", tl(var("y")))}))});
        break;
      case 2:
        body = if_(expr(3), tiny_body(), tiny_body());
        break;
      case 3:
        body = while_(quote(atom("1")), tiny_body());
        break;
      default:
        body = while_(var("x"), seq({assign("y", expr(3)), assign("z", expr(3))}));
        break;
    }
    return decode(list({list({atom("x")}), body, atom(variable())}));
  }

  /// Mixed suite: roughly half straight-line, half looping.
  std::vector<Program> suite(std::size_t count) {
    std::vector<Program> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(chance(1, 2) ? tiny(1) : looping());
    return out;
  }

private:
  std::mt19937_64 rng_;
};

/// Random 1# words and programs. Programs only jump forward and never past
/// the halt point, so they always halt normally.
class TrmGenerator {
public:
  explicit TrmGenerator(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return rng_() % n; }

  std::string word(std::size_t max_len) {
    std::string w(below(max_len + 1), '1');
    for (char& c : w)
      if (below(2)) c = '#';
    return w;
  }

  trm::Program program(std::size_t length, std::uint32_t registers) {
    using trm::Instr;
    using trm::Op;
    std::vector<Instr> out;
    for (std::size_t i = 0; i < length; ++i) {
      const std::size_t remaining = length - i;
      const auto reg = static_cast<std::uint32_t>(1 + below(registers));
      switch (below(remaining >= 3 ? 4 : 3)) {
        case 0: out.push_back({Op::add_one, reg}); break;
        case 1: out.push_back({Op::add_hash, reg}); break;
        case 2: out.push_back({Op::jump_forward, static_cast<std::uint32_t>(1 + below(remaining))}); break;
        default: out.push_back({Op::cases, reg}); break;
      }
    }
    return trm::Program::from_instrs(std::move(out));
  }

private:
  std::mt19937_64 rng_;
};

/// (a a ... a) with n elements.
inline SExpr list_of_length(std::uint64_t n, const SExpr& element = atom("a")) {
  SExpr out = nil();
  for (std::uint64_t i = 0; i < n; ++i) out = pair(element, std::move(out));
  return out;
}

}  // namespace srtkit

#endif  // SRTKIT_RANDOM_PROGRAMS_HPP
