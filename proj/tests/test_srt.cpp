#include <gtest/gtest.h>

#include "srtkit/random_programs.hpp"
#include "srtkit/srt.hpp"

using namespace srtkit;

namespace {

void expect_srt(const Program& base, const Program& star, const SExpr& d, Mode mode = Mode::plain) {
  RunResult lhs = run(star, {d}, default_fuel, mode);
  RunResult rhs = run(base, {encode(star), d}, default_fuel, mode);
  ASSERT_TRUE(lhs.halted()) << to_string(lhs.status) << " " << lhs.detail;
  EXPECT_TRUE(same_outcome(lhs, rhs)) << print(*lhs.value);
}

}  // namespace

TEST(Kleene, IntermediateFeedsSpecializedSelf) {
  Program p = demo_program(DemoName::proj1);
  Program tilde = kleene_intermediate(p);
  SExpr q = encode(tilde);
  RunResult r = run(tilde, {q, atom("d")}, default_fuel);
  ASSERT_TRUE(r.halted());
  EXPECT_TRUE(equal(*r.value, encode(specialize(tilde, q))));
}

TEST(Kleene, QuineAndIdentity) {
  Program quine = kleene_fixpoint(demo_program(DemoName::proj1));
  for (const char* d : {"()", "(a b)"}) EXPECT_TRUE(equal(*run(quine, {parse(d)}, 1000).value, encode(quine)));
  Program id = kleene_fixpoint(demo_program(DemoName::proj2));
  EXPECT_EQ(print(*run(id, {parse("(a b)")}, 1000).value), "(a b)");
}

TEST(Kleene, RejectsWrongArityAndReservedNames) {
  EXPECT_THROW(kleene_fixpoint(decode(parse("((x) (:= y x) y)"))), std::invalid_argument);
  EXPECT_THROW(kleene_fixpoint(decode(parse("((q d) (:= %y q) %y)"))), std::invalid_argument);
}

TEST(Moss, FixpointEquation) {
  for (DemoName n : {DemoName::proj1, DemoName::proj2, DemoName::self_recognizer}) {
    Program p = demo_program(n);
    Program star = moss_fixpoint(p);
    for (const char* d : {"()", "x", "(1 (2))"}) expect_srt(p, star, parse(d));
  }
}

TEST(Moss, QhatOnOtherProgramRunsIt) {
  // [[ [[q^]](r) ]](d) = [[p]]([[r]](r), d) with r = ((x) (:= y (cons x x)) y)
  Program p = demo_program(DemoName::proj1);
  SExpr r = parse("((x) (:= y (cons x x)) y)");
  RunResult built = run(moss_qhat(p), {r}, default_fuel);
  ASSERT_TRUE(built.halted());
  RunResult out = run(decode(*built.value), {atom("d")}, default_fuel);
  EXPECT_TRUE(equal(*out.value, pair(r, r)));
}

TEST(Toolkit, WriteAndDiag) {
  SExpr x = parse("(any (old) value)");
  RunResult w = run(write_program(), {x}, 100);
  EXPECT_TRUE(equal(*run(decode(*w.value), {}, 100).value, x));

  SExpr r = parse("((x) (:= y (cons x x)) y)");
  RunResult d = run(diag_program(), {r}, 100);
  EXPECT_TRUE(equal(*run(decode(*d.value), {}, 100).value, pair(r, r)));
}

TEST(Toolkit, DiagOfDiagReproducesItself) {
  SExpr g = encode(diag_program());
  RunResult self = run(diag_program(), {g}, 1000);
  RunResult again = run(decode(*self.value), {}, 1000);
  EXPECT_TRUE(equal(*again.value, *self.value));
}

TEST(Toolkit, ComposeRunsInSequence) {
  Program f = decode(parse("((x) (:= y (cons x x)) y)"));
  Program g = decode(parse("((x) (:= y (hd x)) y)"));
  Program fg = compose(f, g);
  EXPECT_EQ(print(*run(fg, {parse("(a)")}, 100).value), "(a)");
  Program ff = compose(f, f);
  EXPECT_EQ(print(*run(ff, {atom("a")}, 100).value), "((a . a) a . a)");
}

TEST(Reflective, FixpointUsesOwnText) {
  Program p = demo_program(DemoName::proj1);
  Program star = reflective_fixpoint(p);
  expect_srt(p, star, atom("d"), Mode::reflective);
  EXPECT_EQ(*run(star, {nil()}, 100, Mode::reflective).value, encode(star));
}

TEST(Demos, SelfRecognizer) {
  Program star = kleene_fixpoint(demo_program(DemoName::self_recognizer));
  EXPECT_EQ(print(*run(star, {encode(star)}, 1000).value), "1");
  EXPECT_EQ(print(*run(star, {parse("(a)")}, 1000).value), "0");
}

TEST(Demos, InterchangeRunsItsInputOnItself) {
  Program star = kleene_fixpoint(demo_program(DemoName::interchange));
  RunResult r = run(star, {parse("((x) (:= y x) y)")}, default_fuel);
  ASSERT_TRUE(r.halted());
  EXPECT_TRUE(equal(*r.value, encode(star)));
}

TEST(Demos, UnivCornerLoops) {
  Program star = kleene_fixpoint(demo_program(DemoName::univ_corner));
  EXPECT_EQ(run(star, {nil()}, 50'000).status, Status::fuel_exhausted);
}

TEST(Demos, FactorialValues) {
  Program refl = reflective_fixpoint(demo_program(DemoName::factorial_reflective));
  const std::uint64_t fact[] = {1, 1, 2, 6, 24, 120, 720};
  for (int n = 0; n <= 6; ++n) {
    RunResult r = run(refl, {numeral(n)}, default_fuel, Mode::reflective);
    ASSERT_TRUE(r.halted());
    EXPECT_EQ(numeral_value(*r.value), fact[n]);
  }
  Program univ = kleene_fixpoint(demo_program(DemoName::factorial_univ));
  for (int n = 0; n <= 2; ++n) EXPECT_EQ(numeral_value(*run(univ, {numeral(n)}, default_fuel).value), fact[n]);
}

TEST(Demos, NamesRoundTrip) {
  for (DemoName n : all_demos) EXPECT_EQ(demo_from_string(to_string(n)), n);
  EXPECT_EQ(demo_from_string("self-recognizer"), DemoName::self_recognizer);
  EXPECT_FALSE(demo_from_string("nope"));
}

TEST(Random, TinyFixpointsSatisfyEquation) {
  ProgramGenerator g(7);
  for (int i = 0; i < 5; ++i) {
    Program p = g.tiny(2);
    Program k = kleene_fixpoint(p), m = moss_fixpoint(p);
    for (int j = 0; j < 3; ++j) {
      SExpr d = g.datum(9);
      expect_srt(p, k, d);
      expect_srt(p, m, d);
    }
  }
}
