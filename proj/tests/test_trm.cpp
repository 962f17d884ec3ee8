#include <gtest/gtest.h>

#include "srtkit/random_programs.hpp"
#include "srtkit/trm.hpp"

using namespace srtkit::trm;

namespace {

constexpr std::uint64_t fuel = 10'000'000;

std::size_t error_offset(std::string_view raw) {
  try {
    trm_parse(raw);
  } catch (const TrmParseError& e) {
    return e.offset();
  }
  return std::string::npos;
}

}  // namespace

TEST(TrmParse, SmallestInstructions) {
  EXPECT_EQ(trm_parse("1#").instrs(), (std::vector<Instr>{{Op::add_one, 1}}));
  EXPECT_EQ(trm_parse("11##").instrs(), (std::vector<Instr>{{Op::add_hash, 2}}));
  EXPECT_EQ(trm_parse("1###").instrs(), (std::vector<Instr>{{Op::jump_forward, 1}}));
  EXPECT_EQ(trm_parse("1####111#####").instrs(),
            (std::vector<Instr>{{Op::jump_backward, 1}, {Op::cases, 3}}));
}

TEST(TrmParse, Errors) {
  EXPECT_EQ(error_offset("#1#"), 0u);
  EXPECT_EQ(error_offset("1#1######"), 2u);
  EXPECT_EQ(error_offset("1#11"), 2u);
  EXPECT_EQ(error_offset("1#x"), 2u);
  EXPECT_EQ(error_offset("1#1#"), std::string::npos);
}

TEST(TrmParse, RoundTripOnToolkit) {
  for (const Program& p : {trm_write_program(), trm_diag_program(), trm_s11_program(), trm_move(3, 7)})
    EXPECT_EQ(trm_print(trm_parse(trm_print(p))), trm_print(p));
  EXPECT_EQ(strip_whitespace(" 1#\n11## "), "1#11##");
}

TEST(TrmRun, SingleInstruction) {
  RunResult r = trm_run(trm_parse("1#"), {std::string()}, 10);
  EXPECT_TRUE(r.halted());
  EXPECT_EQ(r.output, "1");
  EXPECT_EQ(r.steps, 1u);
}

TEST(TrmRun, CasesConsumesFrontSymbol) {
  // 1: cases R1; 2-4: jumps to the empty / '1' / '#' arms, which write
  // #, 1 and 11 to R2 respectively.
  Program p = trm_parse("1#####" "111###" "1111###" "11111###"
                        "11##" "11111###"
                        "11#" "111###"
                        "11#" "11#");
  auto arm = [&](const std::string& in) {
    RunResult r = trm_run(p, {in}, 100);
    EXPECT_TRUE(r.halted());
    return r.registers.at(0) + "|" + r.registers.at(1);
  };
  EXPECT_EQ(arm(""), "|#");
  EXPECT_EQ(arm("1#"), "#|1");
  EXPECT_EQ(arm("#1"), "1|11");
}

TEST(TrmRun, AbnormalHalt) {
  EXPECT_EQ(trm_run(trm_parse("11###"), {}, 10).status, TrmStatus::abnormal_halt);
  EXPECT_EQ(trm_run(trm_parse("1#1####"), {}, 10).status, TrmStatus::fuel_exhausted);
  EXPECT_EQ(trm_run(trm_parse("1#11####"), {}, 10).status, TrmStatus::abnormal_halt);
}

TEST(TrmMove, StepsPerSymbol) {
  // 4 per '1', 3 per '#', 2 for the final empty test
  RunResult r = trm_run(trm_move(1, 2), {std::string("1#1")}, 100);
  ASSERT_TRUE(r.halted());
  EXPECT_EQ(r.output, "");
  EXPECT_EQ(r.registers.at(1), "1#1");
  EXPECT_EQ(r.steps, 13u);
}

TEST(TrmMove, FastAssignIsOneStep) {
  RunResult r = trm_run(trm_move(1, 2), {std::string("1#1")}, 100, Variant::fast_assign);
  EXPECT_EQ(r.registers.at(1), "1#1");
  EXPECT_EQ(r.steps, 1u);
  RunResult far = trm_run(trm_move(9, 1), {std::string(), std::string(), std::string()}, 100, Variant::fast_assign);
  EXPECT_EQ(far.steps, 2u);  // outside the recognized range
}

TEST(TrmMove, ThereAndBackRestores) {
  for (std::string x : {"", "1", "#1##1"}) {
    RunResult r = trm_run(trm_compose(trm_move(1, 2), trm_move(2, 1)), {x}, 1000);
    EXPECT_EQ(r.output, x);
  }
}

TEST(TrmWrite, Example) {
  // loop: 5 per '1', 5 per '#', 2 at the end; then move of 5 symbols: 19
  RunResult r = trm_run(trm_write_program(), {std::string("1#")}, 1000);
  EXPECT_EQ(r.output, "1#1##");
  EXPECT_EQ(r.steps, 31u);
  EXPECT_EQ(trm_run(trm_parse(r.output), {}, 10).output, "1#");
}

TEST(TrmWrite, LengthAndTimeAreLinear) {
  srtkit::TrmGenerator g(3);
  for (int i = 0; i < 10; ++i) {
    std::string x = g.word(40);
    RunResult r = trm_run(trm_write_program(), {x}, fuel);
    EXPECT_LE(r.output.size(), 3 * x.size());
    EXPECT_LE(r.steps, 2 + 20 * x.size());
    EXPECT_EQ(trm_run(trm_parse(r.output), {}, fuel).output, x);
  }
}

TEST(TrmDiag, SelfReproduces) {
  const Program& diag = trm_diag_program();
  RunResult self = trm_run(diag, {diag.raw()}, fuel);
  ASSERT_TRUE(self.halted());
  RunResult again = trm_run(trm_parse(self.output), {}, fuel);
  EXPECT_EQ(again.output, self.output);
}

TEST(TrmDiag, Example) {
  EXPECT_EQ(trm_run(trm_diag_program(), {std::string("1#")}, 1000).output, "1#1##1#");
}

TEST(TrmS11, ShapeAndLaw) {
  RunResult r = trm_run(trm_s11_program(), {std::string("1#"), std::string("1##")}, 1000);
  EXPECT_EQ(r.output, trm_move(1, 2).raw() + "1#1##1##" + "1#");
  Program concat = trm_concat();
  for (auto [s, d] : {std::pair<std::string, std::string>{"", ""}, {"1", "#"}, {"1#1", "##"}, {"#", "11#"}}) {
    RunResult spec = trm_run(trm_s11_program(), {concat.raw(), s}, fuel);
    RunResult lhs = trm_run(trm_parse(spec.output), {d}, fuel);
    EXPECT_EQ(lhs.output, trm_run(concat, {s, d}, fuel).output);
    EXPECT_EQ(lhs.output, s + d);
  }
}

TEST(TrmS11, FusedAgreesWithCompositional) {
  srtkit::TrmGenerator g(5);
  for (int i = 0; i < 10; ++i) {
    std::string p = g.program(1 + g.below(6), 3).raw(), s = g.word(10);
    EXPECT_EQ(trm_run(trm_s11_program(), {p, s}, fuel).output, trm_run(trm_s11_fused_program(), {p, s}, fuel).output);
  }
}

TEST(TrmCompose, WriterThenProgram) {
  for (std::string x : {"", "1#", "##1"}) {
    RunResult r = trm_run(trm_compose(trm_writer(x), trm_write_program()), {}, fuel);
    EXPECT_EQ(r.output, trm_run(trm_write_program(), {x}, fuel).output);
  }
  EXPECT_EQ(trm_compose(trm_writer("1#"), Program{}), trm_writer("1#"));
}

TEST(TrmFixpoint, BothConstructionsSatisfyEquation) {
  for (const Program& p : {trm_proj1(), trm_proj2(), trm_concat()}) {
    for (const Program& star : {trm_moss_fixpoint(p), trm_kleene_fixpoint(p)}) {
      for (std::string d : {"", "1#", "##11#"}) {
        RunResult lhs = trm_run(star, {d}, fuel);
        RunResult rhs = trm_run(p, {star.raw(), d}, fuel);
        ASSERT_TRUE(lhs.halted());
        EXPECT_EQ(lhs.output, rhs.output);
      }
    }
  }
}

TEST(TrmFixpoint, ProjectionGivesQuine) {
  Program star = trm_moss_fixpoint(trm_proj1());
  EXPECT_EQ(trm_run(star, {std::string("1#")}, fuel).output, star.raw());
}

TEST(TrmFixpoint, SetupCutPrecedesBaseProgram) {
  Program p = trm_proj2();
  Program star = trm_moss_fixpoint(p);
  RunResult r = trm_run(star, {std::string("1#")}, fuel, Variant::standard, embedded_start(star, p));
  ASSERT_TRUE(r.watch_steps.has_value());
  EXPECT_LT(*r.watch_steps, r.steps);
  EXPECT_EQ(star.raw().substr(star.raw().size() - p.raw().size()), p.raw());
}

TEST(TrmFastAssign, SameOutputsFewerSteps) {
  for (const Program& p : {trm_proj1(), trm_concat()}) {
    Program star = trm_kleene_fixpoint(p);
    RunResult a = trm_run(star, {std::string("1#1")}, fuel);
    RunResult b = trm_run(star, {std::string("1#1")}, fuel, Variant::fast_assign);
    EXPECT_EQ(a.output, b.output);
    EXPECT_LT(b.steps, a.steps);
  }
}
