#ifndef SRTKIT_REPORT_HPP
#define SRTKIT_REPORT_HPP

// Experiment harness. Each experiment returns a Report that serializes to
//   {experiment, seed, parameters, datapoints[], verdicts[]}
// Verdict claim ids are acceptance-criterion numbers ("8", "10", ...).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srtkit/flowchart.hpp"
#include "srtkit/random_programs.hpp"
#include "srtkit/selfint.hpp"
#include "srtkit/sexpr.hpp"
#include "srtkit/srt.hpp"
#include "srtkit/trm.hpp"

namespace srtkit {

using Json = nlohmann::ordered_json;

struct Datapoint {
  std::string label;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> tree_size;
  std::optional<std::uint64_t> dag_size;
  std::string status = "ok";
  Json extra = Json::object();  // experiment-specific columns
};

enum class Outcome { pass, fail, report_only };

inline const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::report_only: return "report-only";
  }
  return "?";
}

struct Verdict {
  std::string claim;  // acceptance-criterion id
  std::string description;
  Outcome outcome = Outcome::report_only;
  double measured = 0.0;
  std::string note;
};

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  Json parameters = Json::object();
  std::vector<Datapoint> datapoints;
  std::vector<Verdict> verdicts;

  bool all_pass() const {
    return std::none_of(verdicts.begin(), verdicts.end(),
                        [](const Verdict& v) { return v.outcome == Outcome::fail; });
  }
};

inline Json to_json(const Datapoint& d) {
  Json j;
  j["label"] = d.label;
  if (d.n) j["n"] = *d.n;
  if (d.steps) j["steps"] = *d.steps;
  if (d.tree_size) j["tree_size"] = *d.tree_size;
  if (d.dag_size) j["dag_size"] = *d.dag_size;
  j["status"] = d.status;
  for (auto& [k, v] : d.extra.items()) j[k] = v;
  return j;
}

inline Json to_json(const Verdict& v) {
  return Json{{"claim", v.claim},
              {"description", v.description},
              {"outcome", to_string(v.outcome)},
              {"measured", v.measured},
              {"note", v.note}};
}

inline Json to_json(const Report& r) {
  Json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["parameters"] = r.parameters;
  j["datapoints"] = Json::array();
  for (const auto& d : r.datapoints) j["datapoints"].push_back(to_json(d));
  j["verdicts"] = Json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  return j;
}

/// Least-squares line through (x, y); returns max |residual| / (max y - min y).
inline double affine_fit_residual(const std::vector<double>& x, const std::vector<double>& y,
                                  double* slope = nullptr, double* intercept = nullptr) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double a = (sy - b * sx) / n;
  if (slope) *slope = b;
  if (intercept) *intercept = a;
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::fabs(y[i] - (a + b * x[i])));
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi > *lo ? worst / (*hi - *lo) : 0.0;
}

// ---------------------------------------------------------------------------
// factorial-curve

inline constexpr double growth_threshold = 1.5;
inline constexpr double linear_residual_bound = 0.10;

struct FactorialOptions {
  int univ_n_max = 6;
  int reflective_n_max = 12;
  int univ_ratio_from = 3;
  /// Per-point fuel for the univ-nested variant. 2e9 is enough to finish
  /// n = 4 and to exceed 1.5 * steps(4) at n = 5.
  std::uint64_t univ_fuel = 2'000'000'000;
  std::uint64_t reflective_fuel = default_fuel;
};

inline Report experiment_factorial_curve(const FactorialOptions& opt = {}) {
  Report rep;
  rep.experiment = "factorial-curve";
  rep.parameters = {{"univ_n_max", opt.univ_n_max},
                    {"reflective_n_max", opt.reflective_n_max},
                    {"univ_fuel", opt.univ_fuel},
                    {"reflective_fuel", opt.reflective_fuel}};

  auto expected = [](int n) {
    std::uint64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
  };

  // Univ-nested: exact counts while runs halt; the first exhausted run gives
  // a lower bound, later points are skipped.
  const Program univ_star = kleene_fixpoint(demo_program(DemoName::factorial_univ));
  std::vector<std::optional<std::uint64_t>> exact(opt.univ_n_max + 1);
  std::vector<std::optional<std::uint64_t>> lower(opt.univ_n_max + 1);
  bool values_ok = true;
  bool stopped = false;
  for (int n = 0; n <= opt.univ_n_max; ++n) {
    Datapoint d;
    d.label = "univ";
    d.n = n;
    if (stopped) {
      d.status = "not_run";
      rep.datapoints.push_back(d);
      continue;
    }
    RunResult r = run(univ_star, {numeral(n)}, opt.univ_fuel);
    d.steps = r.steps;
    d.status = to_string(r.status);
    if (r.halted()) {
      exact[n] = r.steps;
      std::uint64_t v = numeral_value(*r.value);
      d.extra["value"] = v;
      if (v != expected(n)) values_ok = false;
    } else {
      lower[n] = r.steps;
      d.extra["steps_lower_bound"] = true;
      stopped = true;
    }
    rep.datapoints.push_back(d);
  }

  bool growth_ok = true;
  bool nondecreasing = true;
  double min_ratio = INFINITY;
  double prev_ratio = 0;
  std::string missing;
  for (int n = opt.univ_ratio_from; n <= opt.univ_n_max; ++n) {
    if (!exact[n - 1] || (!exact[n] && !lower[n])) {
      growth_ok = false;
      missing += (missing.empty() ? "" : ",") + std::to_string(n);
      continue;
    }
    const double prev = static_cast<double>(*exact[n - 1]);
    if (exact[n]) {
      const double ratio = static_cast<double>(*exact[n]) / prev;
      min_ratio = std::min(min_ratio, ratio);
      if (ratio < prev_ratio) nondecreasing = false;
      prev_ratio = ratio;
      if (ratio < growth_threshold) growth_ok = false;
    } else {
      // Exhausted fuel: steps(n) > fuel >= 1.5 * steps(n-1) proves the ratio.
      const double bound = static_cast<double>(*lower[n]) / prev;
      min_ratio = std::min(min_ratio, bound);
      if (bound < growth_threshold) growth_ok = false;
    }
  }
  Verdict growth{"8", "univ-nested steps(n)/steps(n-1) >= 1.5 for n = " +
                          std::to_string(opt.univ_ratio_from) + ".." + std::to_string(opt.univ_n_max),
                 growth_ok ? Outcome::pass : Outcome::fail, std::isfinite(min_ratio) ? min_ratio : 0.0, ""};
  if (!missing.empty()) growth.note = "not evaluated within fuel for n = " + missing;
  rep.verdicts.push_back(growth);
  rep.verdicts.push_back({"8", "univ-nested ratio nondecreasing over exact points", Outcome::report_only,
                          nondecreasing ? 1.0 : 0.0, nondecreasing ? "nondecreasing" : "decreases somewhere"});

  // Reflective: linear.
  const Program refl_star = reflective_fixpoint(demo_program(DemoName::factorial_reflective));
  std::vector<double> xs, ys;
  for (int n = 0; n <= opt.reflective_n_max; ++n) {
    RunResult r = run(refl_star, {numeral(n)}, opt.reflective_fuel, Mode::reflective);
    Datapoint d;
    d.label = "reflective";
    d.n = n;
    d.steps = r.steps;
    d.status = to_string(r.status);
    if (r.halted()) {
      std::uint64_t v = numeral_value(*r.value);
      d.extra["value"] = v;
      if (v != expected(n)) values_ok = false;
      if (n >= 1) {
        xs.push_back(n);
        ys.push_back(static_cast<double>(r.steps));
      }
    } else {
      values_ok = false;
    }
    rep.datapoints.push_back(d);
  }
  double slope = 0, intercept = 0;
  const double residual = xs.size() >= 2 ? affine_fit_residual(xs, ys, &slope, &intercept) : INFINITY;
  rep.verdicts.push_back({"8", "reflective steps affine in n (max residual <= 10% of range), n = 1.." +
                                   std::to_string(opt.reflective_n_max),
                          residual <= linear_residual_bound ? Outcome::pass : Outcome::fail, residual,
                          "fit steps = " + std::to_string(intercept) + " + " + std::to_string(slope) + " n"});
  rep.verdicts.push_back({"8", "every halted point computes n!", values_ok ? Outcome::pass : Outcome::fail,
                          values_ok ? 1.0 : 0.0, ""});
  return rep;
}

// ---------------------------------------------------------------------------
// overhead

struct NamedProgram {
  std::string name;
  Program program;
};

/// The three programs of the overhead experiment.
inline std::vector<NamedProgram> overhead_programs() {
  using namespace syn;
  return {
      {"identity", decode(program({"x"}, assign("x", var("x")), "x"))},
      {"reverse", decode(program({"x"},
                                 seq({assign("y", quote(nil())),
                                      while_(var("x"), seq({assign("y", cons(hd(var("x")), var("y"))),
                                                            assign("x", tl(var("x")))}))}),
                                 "y"))},
      {"last", decode(program({"x"},
                              seq({assign("y", quote(nil())),
                                   while_(var("x"), seq({assign("y", hd(var("x"))), assign("x", tl(var("x")))}))}),
                              "y"))},
  };
}

inline std::vector<SExpr> overhead_inputs() {
  return {list_of_length(10), list_of_length(100), list_of_length(1000)};
}

inline Report experiment_overhead(std::uint64_t fuel = default_fuel) {
  Report rep;
  rep.experiment = "overhead";
  rep.parameters = {{"fuel", fuel}, {"list_lengths", {10, 100, 1000}}};
  bool all_stable = true;
  double worst = 0;
  for (const auto& [name, p] : overhead_programs()) {
    OverheadReport o = measure_overhead(name, p, overhead_inputs(), fuel);
    for (const auto& row : o.rows) {
      Datapoint d;
      d.label = name;
      d.tree_size = row.input_size;
      d.steps = row.time_univ;
      d.status = row.complete ? "ok" : "fuel_exhausted";
      d.extra = {{"time_p", row.time_p}, {"time_univ", row.time_univ}, {"ratio", row.ratio}};
      rep.datapoints.push_back(d);
    }
    all_stable = all_stable && o.class2;
    worst = std::max(worst, o.spread);
  }
  rep.verdicts.push_back({"6", "overhead ratio spread <= 1.2 across input sizes spanning 100x",
                          all_stable ? Outcome::pass : Outcome::fail, worst, "max spread over programs"});
  return rep;
}

// ---------------------------------------------------------------------------
// trm-compare

inline constexpr double trm_setup_low = 5e3;
inline constexpr double trm_setup_high = 5e5;
inline constexpr double trm_ratio_low = 1.2;
inline constexpr double trm_ratio_high = 4.0;
inline constexpr double trm_speedup_min = 1.3;

struct NamedTrm {
  std::string name;
  trm::Program program;
};

inline std::vector<NamedTrm> trm_compare_programs() {
  return {{"proj1", trm::trm_proj1()}, {"proj2", trm::trm_proj2()}, {"concat", trm::trm_concat()}};
}

inline Report experiment_trm_compare(std::uint64_t fuel = trm::default_construction_fuel) {
  using namespace trm;
  Report rep;
  rep.experiment = "trm-compare";
  const std::vector<std::string> inputs = {"", "1#", "11#1##1"};
  rep.parameters = {{"fuel", fuel}, {"inputs", inputs}, {"verdict_program", "proj1"}, {"verdict_input", ""}};

  bool same_outputs = true;
  double min_speedup = INFINITY;
  std::optional<double> setup_proj1, ratio_proj1;
  for (const auto& [name, p] : trm_compare_programs()) {
    const trm::Program moss = trm_moss_fixpoint(p, fuel);
    const trm::Program kleene = trm_kleene_fixpoint(p, fuel);
    for (const std::string& d : inputs) {
      std::uint64_t total[2] = {0, 0};
      int idx = 0;
      for (const auto& [method, star] : {std::pair<const char*, const trm::Program&>{"moss", moss}, {"kleene", kleene}}) {
        trm::RunResult std_run = trm_run(star, {d}, fuel, Variant::standard, embedded_start(star, p));
        trm::RunResult fast_run = trm_run(star, {d}, fuel, Variant::fast_assign);
        if (!std_run.halted() || !fast_run.halted() || std_run.output != fast_run.output) same_outputs = false;
        const double speedup = fast_run.steps ? static_cast<double>(std_run.steps) / fast_run.steps : 0.0;
        min_speedup = std::min(min_speedup, speedup);
        total[idx++] = std_run.steps;
        Datapoint dp;
        dp.label = name + "/" + method;
        dp.n = d.size();
        dp.steps = std_run.steps;
        dp.status = to_string(std_run.status);
        dp.extra = {{"input", d},
                    {"program_length", star.size()},
                    {"setup_steps", std_run.watch_steps ? Json(*std_run.watch_steps) : Json(nullptr)},
                    {"fast_assign_steps", fast_run.steps},
                    {"speedup", speedup}};
        rep.datapoints.push_back(dp);
        if (name == "proj1" && d.empty() && std::string(method) == "moss" && std_run.watch_steps)
          setup_proj1 = static_cast<double>(*std_run.watch_steps);
      }
      const double ratio = total[0] ? static_cast<double>(total[1]) / total[0] : 0.0;
      Datapoint dp;
      dp.label = name + "/kleene:moss";
      dp.n = d.size();
      dp.extra = {{"input", d}, {"ratio", ratio}};
      rep.datapoints.push_back(dp);
      if (name == "proj1" && d.empty()) ratio_proj1 = ratio;
      else
        rep.verdicts.push_back({"10", name + " kleene/moss total-step ratio, d = \"" + d + "\"", Outcome::report_only,
                                ratio, ""});
    }
  }
  auto window = [](std::optional<double> v, double lo, double hi) {
    return v && *v >= lo && *v <= hi ? Outcome::pass : Outcome::fail;
  };
  rep.verdicts.push_back({"10", "moss p* setup steps in [5e3, 5e5] (proj1, d empty)",
                          window(setup_proj1, trm_setup_low, trm_setup_high), setup_proj1.value_or(0), ""});
  rep.verdicts.push_back({"10", "kleene/moss total-step ratio in [1.2, 4] (proj1, d empty)",
                          window(ratio_proj1, trm_ratio_low, trm_ratio_high), ratio_proj1.value_or(0), ""});
  rep.verdicts.push_back({"10", "fast_assign speedup >= 1.3 with identical outputs",
                          same_outputs && min_speedup >= trm_speedup_min ? Outcome::pass : Outcome::fail,
                          std::isfinite(min_speedup) ? min_speedup : 0.0, "minimum over all runs"});
  return rep;
}

// ---------------------------------------------------------------------------
// sizes

struct ConstructedFixpoint {
  std::string demo;
  std::string method;
  SExpr intermediate;  // p~ for kleene, q^ for moss, p for reflective
  Program fixpoint;
};

/// Every flowchart p* the demos construct.
inline std::vector<ConstructedFixpoint> constructed_fixpoints() {
  std::vector<ConstructedFixpoint> out;
  for (DemoName n : all_demos) {
    Program p = demo_program(n);
    if (n == DemoName::factorial_reflective) {
      out.push_back({to_string(n), "reflective", encode(p), reflective_fixpoint(p)});
      continue;
    }
    Program tilde = kleene_intermediate(p);
    out.push_back({to_string(n), "kleene", encode(tilde), specialize(tilde, encode(tilde))});
    Program qhat = moss_qhat(p);
    out.push_back({to_string(n), "moss", encode(qhat), moss_fixpoint(p)});
  }
  return out;
}

inline Report experiment_sizes() {
  Report rep;
  rep.experiment = "sizes";
  bool shared = true;
  std::optional<std::int64_t> kleene_growth, moss_growth;
  bool kleene_constant = true, moss_constant = true;
  for (const auto& c : constructed_fixpoints()) {
    Measure m = measure(encode(c.fixpoint));
    Measure mi = measure(c.intermediate);
    const std::int64_t growth =
        static_cast<std::int64_t>(m.dag_size) - static_cast<std::int64_t>(mi.dag_size);
    Datapoint d;
    d.label = c.demo + "/" + c.method;
    d.tree_size = m.tree_size;
    d.dag_size = m.dag_size;
    d.extra = {{"intermediate_tree_size", mi.tree_size},
               {"intermediate_dag_size", mi.dag_size},
               {"dag_growth", growth}};
    rep.datapoints.push_back(d);
    if (c.method == "reflective") continue;
    if (!(m.tree_size > m.dag_size)) shared = false;
    auto& g = c.method == "kleene" ? kleene_growth : moss_growth;
    bool& same = c.method == "kleene" ? kleene_constant : moss_constant;
    if (!g) g = growth;
    else if (*g != growth) same = false;
  }
  rep.verdicts.push_back({"12", "tree_size(p*) > dag_size(p*) for every constructed p*",
                          shared ? Outcome::pass : Outcome::fail, shared ? 1.0 : 0.0, ""});
  rep.verdicts.push_back({"12", "dag_size(p*) - dag_size(p~) is the same constant for every kleene p*",
                          kleene_constant ? Outcome::pass : Outcome::fail,
                          static_cast<double>(kleene_growth.value_or(0)), ""});
  rep.verdicts.push_back({"12", "dag_size(p*) - dag_size(q^) is the same constant for every moss p*",
                          moss_constant ? Outcome::pass : Outcome::fail,
                          static_cast<double>(moss_growth.value_or(0)), ""});
  return rep;
}

}  // namespace srtkit

#endif  // SRTKIT_REPORT_HPP
