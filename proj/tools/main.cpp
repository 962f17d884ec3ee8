// srtkit command-line front end.
//
// Exit codes: 0 success, 1 program error (parse/decode failure, no halt,
// runtime fault), 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
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

struct ProgramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProgramError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool is_trm_path(const std::string& path) { return path.size() >= 3 && path.substr(path.size() - 3) == ".1#"; }

std::string resolve_lang(const std::string& lang, const std::string& path) {
  if (!lang.empty()) return lang;
  return is_trm_path(path) ? "trm" : "flow";
}

/// A program argument is a file path, or inline text when no such file exists.
std::string program_text(const std::string& arg) {
  std::ifstream probe(arg);
  return probe ? read_file(arg) : arg;
}

/// Programs printed by this tool may use reserved names, so only fixpoint
/// inputs are read as user source.
Program load_flow(const std::string& arg, Origin origin = Origin::generated) {
  return decode(parse(program_text(arg)), origin);
}

trm::Program load_trm(const std::string& arg) { return trm::trm_parse(trm::strip_whitespace(program_text(arg))); }

struct Options {
  std::uint64_t seed = 1;
  std::uint64_t fuel = default_fuel;
  std::string lang;
  std::string mode = "plain";
  std::string variant = "standard";
  std::string method = "kleene";
  bool steps = false;
  std::string file;
  std::vector<std::string> args;
  std::string demo;
  std::string stage;
  std::string source;
  std::string experiment;
  std::string json_out;
  int n_max = 6;
  std::uint64_t univ_fuel = FactorialOptions{}.univ_fuel;
  std::size_t arity = 2;
};

int cmd_run(const Options& o) {
  if (resolve_lang(o.lang, o.file) == "trm") {
    trm::Program p = load_trm(o.file);
    auto variant = o.variant == "fast-assign" ? trm::Variant::fast_assign : trm::Variant::standard;
    trm::RunResult r = trm::trm_run(p, o.args, o.fuel, variant);
    if (o.steps) std::cerr << "steps: " << r.steps << "\n";
    if (!r.halted()) throw ProgramError(std::string("run stopped: ") + trm::to_string(r.status));
    std::cout << r.output << "\n";
    return 0;
  }
  Program p = load_flow(o.file);
  std::vector<SExpr> args;
  for (const auto& a : o.args) args.push_back(parse(a));
  RunResult r = run(p, args, o.fuel, o.mode == "reflective" ? Mode::reflective : Mode::plain);
  if (o.steps) std::cerr << "steps: " << r.steps << "\n";
  if (!r.halted())
    throw ProgramError(std::string("run stopped: ") + to_string(r.status) + (r.detail.empty() ? "" : ": " + r.detail));
  std::cout << print(*r.value) << "\n";
  return 0;
}

int cmd_specialize(const Options& o) {
  if (resolve_lang(o.lang, o.file) == "trm") {
    if (o.args.size() != 1) throw CLI::ValidationError("specialize", "needs exactly one static input");
    trm::Program p = load_trm(o.file);
    trm::RunResult r = trm::trm_run(trm::trm_s11_program(), {p.raw(), o.args[0]}, o.fuel);
    if (!r.halted()) throw ProgramError("s11 did not halt");
    std::cout << r.output << "\n";
    return 0;
  }
  if (o.args.size() != 1) throw CLI::ValidationError("specialize", "needs exactly one static input");
  std::cout << print(encode(specialize(load_flow(o.file), parse(o.args[0])))) << "\n";
  return 0;
}

int cmd_fixpoint(const Options& o) {
  if (resolve_lang(o.lang, o.file) == "trm") {
    trm::Program p = load_trm(o.file);
    if (o.method == "reflective") throw CLI::ValidationError("--method", "reflective applies to flowcharts only");
    std::cout << (o.method == "moss" ? trm::trm_moss_fixpoint(p) : trm::trm_kleene_fixpoint(p)).raw() << "\n";
    return 0;
  }
  Program p = load_flow(o.file, Origin::user);
  Program star = o.method == "moss"         ? moss_fixpoint(p, o.fuel)
                 : o.method == "reflective" ? reflective_fixpoint(p)
                                            : kleene_fixpoint(p);
  std::cout << print(encode(star)) << "\n";
  return 0;
}

int cmd_demo(const Options& o) {
  auto name = demo_from_string(o.demo);
  if (!name) throw CLI::ValidationError("demo", "unknown demo '" + o.demo + "'");
  Program p = demo_program(*name);
  Program star = *name == DemoName::factorial_reflective ? reflective_fixpoint(p)
                 : o.method == "moss"                    ? moss_fixpoint(p, o.fuel)
                                                         : kleene_fixpoint(p);
  std::cout << print(encode(star)) << "\n";
  return 0;
}

int cmd_futamura(const Options& o) {
  FutamuraStage stage;
  if (o.stage == "target") stage = FutamuraStage::target;
  else if (o.stage == "compiler") stage = FutamuraStage::compiler;
  else if (o.stage == "cogen") stage = FutamuraStage::cogen;
  else throw CLI::ValidationError("futamura", "stage must be target, compiler or cogen");
  if (stage == FutamuraStage::target && o.source.empty())
    throw CLI::ValidationError("futamura", "target needs a source program");
  std::optional<Program> source;
  if (!o.source.empty()) source = load_flow(o.source);
  std::cout << print(encode(futamura(stage, source))) << "\n";
  return 0;
}

void print_table(const Report& r) {
  for (const auto& d : r.datapoints) {
    std::cout << d.label;
    if (d.n) std::cout << "  n=" << *d.n;
    if (d.steps) std::cout << "  steps=" << *d.steps;
    if (d.tree_size) std::cout << "  tree_size=" << *d.tree_size;
    if (d.dag_size) std::cout << "  dag_size=" << *d.dag_size;
    if (d.status != "ok") std::cout << "  [" << d.status << "]";
    for (auto& [k, v] : d.extra.items()) std::cout << "  " << k << "=" << v.dump();
    std::cout << "\n";
  }
  for (const auto& v : r.verdicts)
    std::cout << "[" << to_string(v.outcome) << "] criterion " << v.claim << ": " << v.description
              << " -> " << v.measured << (v.note.empty() ? "" : " (" + v.note + ")") << "\n";
}

int cmd_experiment(const Options& o) {
  Report r;
  if (o.experiment == "factorial-curve") {
    FactorialOptions f;
    f.univ_n_max = o.n_max;
    f.univ_fuel = o.univ_fuel;
    r = experiment_factorial_curve(f);
  } else if (o.experiment == "overhead") {
    r = experiment_overhead(o.fuel);
  } else if (o.experiment == "trm-compare") {
    r = experiment_trm_compare();
  } else if (o.experiment == "sizes") {
    r = experiment_sizes();
  } else {
    throw CLI::ValidationError("experiment", "unknown experiment '" + o.experiment + "'");
  }
  r.seed = o.seed;
  const std::string text = to_json(r).dump(2) + "\n";
  if (o.json_out == "-") {
    std::cout << text;
  } else {
    if (!o.json_out.empty()) {
      std::ofstream out(o.json_out, std::ios::binary);
      if (!out) throw ProgramError("cannot write " + o.json_out);
      out << text;
    }
    print_table(r);
  }
  return 0;
}

int cmd_generate(const Options& o) {
  ProgramGenerator g(o.seed);
  std::cout << print(encode(g.tiny(o.arity))) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixpoints, specialization and self-interpretation for a small flowchart language and 1#"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "seed for anything random")->capture_default_str();

  const std::vector<std::string> langs = {"flow", "trm"};
  auto add_lang = [&](CLI::App* c) {
    c->add_option("--lang", o.lang, "flow or trm (default: from file extension)")->check(CLI::IsMember(langs));
  };
  auto add_fuel = [&](CLI::App* c) { c->add_option("--fuel", o.fuel, "step budget")->capture_default_str(); };

  auto* run_cmd = app.add_subcommand("run", "run a program");
  run_cmd->add_option("file", o.file, "program file (.sexp or .1#)")->required();
  run_cmd->add_option("args", o.args, "inputs: S-expressions, or {1,#} strings for 1#");
  add_fuel(run_cmd);
  add_lang(run_cmd);
  run_cmd->add_option("--mode", o.mode, "plain or reflective")->check(CLI::IsMember({"plain", "reflective"}));
  run_cmd->add_option("--variant", o.variant, "1# cost model")->check(CLI::IsMember({"standard", "fast-assign"}));
  run_cmd->add_flag("--steps", o.steps, "print the step count on stderr");

  auto* spec_cmd = app.add_subcommand("specialize", "freeze a program's first input");
  spec_cmd->add_option("prog", o.file, "program file or text")->required();
  spec_cmd->add_option("static", o.args, "static input")->required();
  add_fuel(spec_cmd);
  add_lang(spec_cmd);

  const std::vector<std::string> methods = {"kleene", "moss", "reflective"};
  auto* fix_cmd = app.add_subcommand("fixpoint", "build p* with [[p*]](d) = [[p]](p*, d)");
  fix_cmd->add_option("prog", o.file, "2-input program file or text")->required();
  fix_cmd->add_option("--method", o.method)->check(CLI::IsMember(methods))->capture_default_str();
  add_fuel(fix_cmd);
  add_lang(fix_cmd);

  auto* demo_cmd = app.add_subcommand("demo", "print the fixpoint of a demo program");
  demo_cmd->add_option("name", o.demo, "proj1, proj2, self-recognizer, univ-corner, factorial-univ, "
                                       "factorial-reflective, interchange")
      ->required();
  demo_cmd->add_option("--method", o.method)->check(CLI::IsMember({"kleene", "moss"}))->capture_default_str();
  add_fuel(demo_cmd);

  auto* fut_cmd = app.add_subcommand("futamura", "Futamura projections through the specializer");
  fut_cmd->add_option("stage", o.stage, "target, compiler or cogen")->required();
  fut_cmd->add_option("source", o.source, "source program (target stage)");

  auto* exp_cmd = app.add_subcommand("experiment", "run a measurement and report");
  exp_cmd->add_option("name", o.experiment, "factorial-curve, overhead, trm-compare or sizes")->required();
  exp_cmd->add_option("--json", o.json_out, "write the JSON report here ('-' for stdout)");
  exp_cmd->add_option("--n-max", o.n_max, "factorial-curve: largest n for the univ-nested variant")
      ->check(CLI::Range(3, 7))
      ->capture_default_str();
  exp_cmd->add_option("--univ-fuel", o.univ_fuel, "factorial-curve: step budget per univ-nested point")
      ->capture_default_str();
  add_fuel(exp_cmd);

  auto* gen_cmd = app.add_subcommand("generate", "print a random straight-line program");
  gen_cmd->add_option("--arity", o.arity)->check(CLI::Range(0, 4))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(o);
    if (spec_cmd->parsed()) return cmd_specialize(o);
    if (fix_cmd->parsed()) return cmd_fixpoint(o);
    if (demo_cmd->parsed()) return cmd_demo(o);
    if (fut_cmd->parsed()) return cmd_futamura(o);
    if (exp_cmd->parsed()) return cmd_experiment(o);
    if (gen_cmd->parsed()) return cmd_generate(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
