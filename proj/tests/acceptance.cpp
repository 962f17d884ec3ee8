// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria, exit 1 if any fails
//   acceptance --only 8   run one criterion

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "srtkit/flowchart.hpp"
#include "srtkit/random_programs.hpp"
#include "srtkit/report.hpp"
#include "srtkit/selfint.hpp"
#include "srtkit/specializer.hpp"
#include "srtkit/srt.hpp"
#include "srtkit/trm.hpp"

using namespace srtkit;

namespace {

constexpr std::uint64_t seed = 20240601;
constexpr std::uint64_t fuel = default_fuel;

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    detail = ok ? why : detail + "; " + why;
    ok = false;
  }
};

using Method = std::function<Program(const Program&)>;

std::vector<std::pair<std::string, Method>> methods() {
  return {{"kleene", [](const Program& p) { return kleene_fixpoint(p); }},
          {"moss", [](const Program& p) { return moss_fixpoint(p); }}};
}

std::vector<Program> random_tiny(std::size_t count, std::size_t arity) {
  ProgramGenerator g(seed);
  std::vector<Program> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(g.tiny(arity));
  return out;
}

std::vector<SExpr> random_data(std::size_t count, std::uint64_t s) {
  ProgramGenerator g(s);
  std::vector<SExpr> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(g.datum(1 + g.below(15)));
  return out;
}

/// Encoded 1-input programs used as data for the interchange demo.
std::vector<SExpr> encoded_programs() {
  std::vector<SExpr> out;
  for (const char* text : {"((x) (:= x x) x)", "((x) (:= y (hd x)) y)", "((x) (:= y (QUOTE k)) y)",
                           "((x) (:= y (tl x)) y)", "((x) (:= y (cons x x)) y)"})
    out.push_back(parse(text));
  return out;
}

Check srt_equation() {
  Check o;
  std::vector<std::pair<std::string, Program>> bases;
  for (DemoName n : {DemoName::proj1, DemoName::proj2, DemoName::self_recognizer, DemoName::interchange})
    bases.emplace_back(to_string(n), demo_program(n));
  auto tiny = random_tiny(10, 2);
  for (std::size_t i = 0; i < tiny.size(); ++i) bases.emplace_back("tiny" + std::to_string(i), tiny[i]);

  int checked = 0;
  for (const auto& [name, p] : bases) {
    auto inputs = name == "interchange" ? encoded_programs() : random_data(5, seed + checked);
    for (const auto& [mname, make] : methods()) {
      Program star = make(p);
      for (const SExpr& d : inputs) {
        RunResult lhs = run(star, {d}, fuel);
        RunResult rhs = run(p, {encode(star), d}, fuel);
        if (!lhs.halted() || !same_outcome(lhs, rhs)) o.fail(name + "/" + mname + " on " + print(d));
        ++checked;
      }
    }
  }
  o.detail = o.ok ? std::to_string(checked) + " equations" : o.detail;
  return o;
}

Check quine() {
  Check o;
  Program star = kleene_fixpoint(demo_program(DemoName::proj1));
  for (const char* d : {"()", "a", "(1 (2 3) . 4)"}) {
    RunResult r = run(star, {parse(d)}, fuel);
    if (!r.halted() || !equal(*r.value, encode(star))) o.fail(std::string("output differs on ") + d);
  }
  if (o.ok) o.detail = "3 inputs, tree_size " + std::to_string(tree_size(encode(star)));
  return o;
}

/// s with its k-th leaf (left to right) replaced by `leaf`.
SExpr replace_leaf(const SExpr& s, std::size_t& k, const SExpr& leaf) {
  if (!s->is_pair()) return k-- == 0 ? leaf : s;
  SExpr h = replace_leaf(head(s), k, leaf);
  SExpr t = replace_leaf(tail(s), k, leaf);
  return pair(std::move(h), std::move(t));
}

Check self_recognizer() {
  Check o;
  const Program p = demo_program(DemoName::self_recognizer);
  const SExpr one = atom("1"), zero = atom("0");
  for (const auto& [mname, make] : methods()) {
    Program star = make(p);
    const SExpr self = encode(star);
    RunResult r = run(star, {self}, fuel);
    if (!r.halted() || !equal(*r.value, one)) o.fail(mname + ": own encoding not recognized");

    std::vector<SExpr> others = {nil(), one, encode(p), encode(kleene_fixpoint(demo_program(DemoName::proj1))),
                                 list({self})};
    const std::uint64_t leaves = (tree_size(self) + 1) / 2;
    for (std::uint64_t i = 0; i < 5; ++i) {
      std::size_t k = static_cast<std::size_t>((i * 2 + 1) * leaves / 10);
      others.push_back(replace_leaf(self, k, atom("%near")));
    }
    for (const SExpr& d : others) {
      if (equal(d, self)) o.fail(mname + ": near-miss equals the original");
      RunResult rd = run(star, {d}, fuel);
      if (!rd.halted() || !equal(*rd.value, zero)) o.fail(mname + ": accepted " + print(d).substr(0, 40));
    }
  }
  if (o.ok) o.detail = "both methods, 10 rejections each (5 one-leaf near-misses)";
  return o;
}

Check constant_time() {
  Check o;
  const std::vector<SExpr> inputs = {atom("a"), list_of_length(500), list_of_length(50000)};
  std::vector<std::pair<std::string, Program>> bases;
  for (DemoName n : {DemoName::proj1, DemoName::proj2, DemoName::self_recognizer})
    bases.emplace_back(to_string(n), demo_program(n));
  auto tiny = random_tiny(10, 2);
  for (std::size_t i = 0; i < tiny.size(); ++i) bases.emplace_back("tiny" + std::to_string(i), tiny[i]);

  int checked = 0;
  for (const auto& [name, p] : bases) {
    for (const auto& [mname, make] : methods()) {
      Program star = make(p);
      // The self-recognizer's branch is a single test, so it is checked too.
      if (!star.is_tiny() && name != "self_recognizer") continue;
      std::optional<std::uint64_t> steps, diff;
      for (const SExpr& d : inputs) {
        RunResult a = run(star, {d}, fuel);
        RunResult b = run(p, {encode(star), d}, fuel);
        if (!a.halted() || !b.halted()) {
          o.fail(name + "/" + mname + " did not halt");
          continue;
        }
        if (steps && *steps != a.steps) o.fail(name + "/" + mname + " steps vary with input size");
        if (diff && *diff != a.steps - b.steps) o.fail(name + "/" + mname + " overhead varies with input");
        steps = a.steps;
        diff = a.steps - b.steps;
      }
      ++checked;
    }
  }
  if (o.ok) o.detail = std::to_string(checked) + " fixpoints, inputs of tree_size 1, 1001, 100001";
  return o;
}

Check dead_code() {
  Check o;
  const Program p = demo_program(DemoName::proj2);
  std::uint64_t worst = 0;
  for (const auto& [mname, make] : methods()) {
    Program star = make(p);
    Program lean = eliminate_dead_code(star);
    for (const SExpr& d : random_data(5, seed)) {
      RunResult a = run(star, {d}, fuel);
      RunResult b = run(lean, {d}, fuel);
      if (!same_outcome(a, b)) o.fail(mname + ": result changed on " + print(d));
      if (b.steps > 10) o.fail(mname + ": " + std::to_string(b.steps) + " steps");
      worst = std::max(worst, b.steps);
    }
  }
  if (o.ok) o.detail = "max steps " + std::to_string(worst);
  return o;
}

Check universal_program() {
  Check o;
  ProgramGenerator g(seed);
  const auto suite = g.suite(50);
  const Program& u = univ_program();
  constexpr std::uint64_t direct_fuel = 100'000;
  constexpr std::uint64_t univ_fuel = 100 * direct_fuel;
  const std::vector<SExpr> sizes = {list_of_length(10), list_of_length(100), list_of_length(1000)};
  int halting = 0;
  double worst = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const Program& p = suite[i];
    std::vector<SExpr> inputs = {g.datum(9), list_of_length(10), list_of_length(100)};
    bool halts = true;
    for (const SExpr& d : inputs) {
      RunResult a = run(p, {d}, direct_fuel);
      RunResult b = run(u, {encode(p), d}, univ_fuel);
      if (a.halted() != b.halted() || (a.halted() && !equal(*a.value, *b.value)))
        o.fail("program " + std::to_string(i) + " disagrees on " + print(d).substr(0, 30));
      halts = halts && a.halted();
    }
    if (!halts) continue;
    ++halting;
    OverheadReport rep = measure_overhead("p" + std::to_string(i), p, sizes, univ_fuel);
    worst = std::max(worst, rep.spread);
    if (!rep.class2) o.fail("program " + std::to_string(i) + " overhead spread " + std::to_string(rep.spread));
  }
  if (o.ok) {
    std::ostringstream s;
    s << "50 programs (" << halting << " halting), max overhead spread " << worst;
    o.detail = s.str();
  }
  return o;
}

Check futamura_identities() {
  Check o;
  const Program compiler = futamura(FutamuraStage::compiler);
  const Program cogen = futamura(FutamuraStage::cogen);
  RunResult c = run(cogen, {encode(univ_program())}, fuel);
  if (!c.halted() || !equal(*c.value, encode(compiler))) o.fail("[[cogen]](U) != compiler");
  RunResult g = run(cogen, {encode(s11_program())}, fuel);
  if (!g.halted() || !equal(*g.value, encode(cogen))) o.fail("[[cogen]](s11) != cogen");
  for (const auto& [name, source] : overhead_programs()) {
    const Program target = futamura(FutamuraStage::target, source);
    RunResult t = run(compiler, {encode(source)}, fuel);
    if (!t.halted() || !equal(*t.value, encode(target))) o.fail("[[compiler]](" + name + ") != target");
    for (const SExpr& d : {list_of_length(3), parse("(a b c d)")}) {
      if (!same_outcome(run(target, {d}, fuel), run(source, {d}, fuel))) o.fail(name + ": target misbehaves");
    }
  }
  if (o.ok) o.detail = "3 sources";
  return o;
}

Check from_report(const Report& r) {
  Check o;
  std::ostringstream s;
  for (const auto& v : r.verdicts) {
    if (v.outcome == srtkit::Outcome::report_only) continue;
    if (v.outcome == srtkit::Outcome::fail) o.fail(v.description + " (measured " + std::to_string(v.measured) +
                                                   (v.note.empty() ? "" : ", " + v.note) + ")");
    s << (s.tellp() ? "; " : "") << v.description << " = " << v.measured;
  }
  if (o.ok) o.detail = s.str();
  return o;
}

Check factorial_curves() { return from_report(experiment_factorial_curve()); }

Check trm_oracles() {
  Check o;
  TrmGenerator g(seed);
  constexpr std::uint64_t f = 10'000'000;

  for (int i = 0; i < 20; ++i) {
    const std::string x = g.word(12);
    trm::RunResult w = trm::trm_run(trm::trm_write_program(), {x}, f);
    if (!w.halted()) {
      o.fail("write did not halt");
      continue;
    }
    trm::RunResult back = trm::trm_run(trm::trm_parse(w.output), {}, f);
    if (!back.halted() || back.output != x) o.fail("w_x() != x for x = " + x);
  }

  std::vector<trm::Program> rs = {trm::trm_write_program(), trm::trm_diag_program(), trm::trm_duplicate_program(), trm::trm_clear(1)};
  while (rs.size() < 10) rs.push_back(g.program(3 + g.below(10), 3));
  for (const trm::Program& r : rs) {
    trm::RunResult d = trm::trm_run(trm::trm_diag_program(), {r.raw()}, f);
    trm::RunResult lhs = trm::trm_run(trm::trm_parse(d.output), {}, f);
    trm::RunResult rhs = trm::trm_run(r, {r.raw()}, f);
    if (lhs.status != rhs.status || lhs.output != rhs.output) o.fail("diag law fails for " + r.raw().substr(0, 30));
  }

  std::vector<trm::Program> ps = {trm::trm_proj1(), trm::trm_proj2(), trm::trm_concat()};
  for (int i = 0; i < 10; ++i) {
    const trm::Program& p = i < 3 ? ps[i] : (ps.push_back(g.program(4 + g.below(8), 3)), ps.back());
    const std::string s = g.word(6), d = g.word(6);
    trm::RunResult spec = trm::trm_run(trm::trm_s11_program(), {p.raw(), s}, f);
    trm::RunResult lhs = trm::trm_run(trm::trm_parse(spec.output), {d}, f);
    trm::RunResult rhs = trm::trm_run(p, {s, d}, f);
    if (lhs.status != rhs.status || lhs.output != rhs.output) o.fail("s11 law fails for p = " + p.raw());
  }

  // Compositions over R1-only programs so nothing is left behind in other registers.
  std::vector<trm::Program> parts = {trm::trm_write_program(), trm::trm_diag_program(), trm::trm_clear(1)};
  for (int i = 0; i < 20; ++i) {
    const trm::Program p = g.below(2) ? parts[g.below(parts.size())] : g.program(2 + g.below(6), 1);
    const trm::Program q = g.below(2) ? parts[g.below(parts.size())] : g.program(2 + g.below(6), 1);
    const std::string x = g.word(8);
    trm::RunResult px = trm::trm_run(p, {x}, f);
    trm::RunResult lhs = trm::trm_run(trm::trm_compose(p, q), {x}, f);
    trm::RunResult rhs = trm::trm_run(q, {px.output}, f);
    if (!px.halted() || lhs.status != rhs.status || lhs.output != rhs.output)
      o.fail("composition fails for " + p.raw().substr(0, 20) + " | " + q.raw().substr(0, 20));
  }
  if (o.ok) o.detail = "20 writes, 10 diag, 10 s11, 20 compositions";
  return o;
}

Check trm_measurements() { return from_report(experiment_trm_compare()); }

Check non_termination() {
  Check o;
  const Program p = demo_program(DemoName::univ_corner);
  for (const auto& [mname, make] : methods()) {
    Program star = make(p);
    for (std::uint64_t f : {10'000ull, 100'000ull, 1'000'000ull}) {
      RunResult r = run(star, {parse("(a b)")}, f);
      if (r.status != Status::fuel_exhausted || r.steps != f)
        o.fail(mname + ": " + to_string(r.status) + " at fuel " + std::to_string(f));
    }
  }
  if (o.ok) o.detail = "kleene and moss exhaust 1e4, 1e5, 1e6";
  return o;
}

Check sharing() { return from_report(experiment_sizes()); }

struct Criterion {
  int id;
  const char* name;
  Check (*check)();
};

const Criterion criteria[] = {
    {1, "SRT equation", srt_equation},
    {2, "quine", quine},
    {3, "self-recognizer", self_recognizer},
    {4, "constant time", constant_time},
    {5, "dead code", dead_code},
    {6, "universal program", universal_program},
    {7, "Futamura identities", futamura_identities},
    {8, "factorial curves", factorial_curves},
    {9, "1# toolkit oracles", trm_oracles},
    {10, "1# measurements", trm_measurements},
    {11, "non-termination corner", non_termination},
    {12, "sharing", sharing},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Check o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s (%.1fs)\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.ok) ++failures;
  }
  return failures ? 1 : 0;
}
