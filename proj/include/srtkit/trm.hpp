#ifndef SRTKIT_TRM_HPP
#define SRTKIT_TRM_HPP

// Text register machine over {1,#}-strings.
//
// Instruction set (n >= 1):
//   1^n #      append 1 to Rn
//   1^n ##     append # to Rn
//   1^n ###    jump forward n
//   1^n ####   jump backward n
//   1^n #####  case on Rn: empty -> next; 1 -> skip 1; # -> skip 2
//              (the inspected symbol is removed)
// A run halts normally when control lands exactly one past the last
// instruction; any other out-of-range target is an abnormal halt.
// Composition is concatenation.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srtkit::trm {

enum class Op : std::uint8_t { add_one = 1, add_hash = 2, jump_forward = 3, jump_backward = 4, cases = 5 };

struct Instr {
  Op op;
  std::uint32_t n;
  friend bool operator==(const Instr&, const Instr&) = default;
};

class TrmParseError : public std::runtime_error {
public:
  TrmParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

inline std::string encode_instr(Instr i) {
  return std::string(i.n, '1') + std::string(static_cast<std::size_t>(i.op), '#');
}

class Program {
public:
  Program() = default;

  static Program parse(std::string_view raw) {
    Program p;
    p.raw_ = raw;
    std::size_t pos = 0;
    while (pos < raw.size()) {
      std::size_t start = pos;
      char c = raw[pos];
      if (c != '1') {
        if (c == '#') throw TrmParseError("instruction starts with '#'", pos);
        throw TrmParseError(std::string("symbol outside {1,#}: '") + c + "'", pos);
      }
      std::uint32_t n = 0;
      while (pos < raw.size() && raw[pos] == '1') ++n, ++pos;
      std::uint32_t k = 0;
      while (pos < raw.size() && raw[pos] == '#') ++k, ++pos;
      if (pos < raw.size() && raw[pos] != '1')
        throw TrmParseError(std::string("symbol outside {1,#}: '") + raw[pos] + "'", pos);
      if (k == 0) throw TrmParseError("instruction has no '#'", start);
      if (k > 5) throw TrmParseError("instruction has more than five '#'", start);
      p.instrs_.push_back({static_cast<Op>(k), n});
    }
    return p;
  }

  static Program from_instrs(std::vector<Instr> instrs) {
    Program p;
    for (const Instr& i : instrs) {
      if (i.n == 0) throw std::invalid_argument("instruction index must be >= 1");
      p.raw_ += encode_instr(i);
    }
    p.instrs_ = std::move(instrs);
    return p;
  }

  const std::string& raw() const noexcept { return raw_; }
  const std::vector<Instr>& instrs() const noexcept { return instrs_; }
  std::size_t size() const noexcept { return instrs_.size(); }
  bool empty() const noexcept { return instrs_.empty(); }

  friend bool operator==(const Program& a, const Program& b) { return a.raw_ == b.raw_; }

private:
  std::string raw_;
  std::vector<Instr> instrs_;
};

inline Program trm_parse(std::string_view raw) { return Program::parse(raw); }
inline const std::string& trm_print(const Program& p) { return p.raw(); }

/// Drops whitespace, as used for `.1#` files.
inline std::string strip_whitespace(std::string_view text) {
  std::string out;
  for (char c : text)
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\f' && c != '\v') out += c;
  return out;
}

/// p | q
inline Program trm_compose(const Program& p, const Program& q) {
  std::vector<Instr> all = p.instrs();
  all.insert(all.end(), q.instrs().begin(), q.instrs().end());
  return Program::from_instrs(std::move(all));
}

inline Program trm_compose(std::initializer_list<Program> parts) {
  std::vector<Instr> all;
  for (const Program& p : parts) all.insert(all.end(), p.instrs().begin(), p.instrs().end());
  return Program::from_instrs(std::move(all));
}

// ---------------------------------------------------------------------------
// Assembler with labels, for the toolkit programs.

class Assembler {
public:
  Assembler& add_one(std::uint32_t r) { return emit({Op::add_one, r}); }
  Assembler& add_hash(std::uint32_t r) { return emit({Op::add_hash, r}); }
  Assembler& cases(std::uint32_t r) { return emit({Op::cases, r}); }
  Assembler& append_symbol(std::uint32_t r, char c) { return c == '1' ? add_one(r) : add_hash(r); }

  Assembler& jump(const std::string& label) {
    items_.push_back({Instr{Op::jump_forward, 0}, label});
    return *this;
  }
  Assembler& label(const std::string& name) {
    labels_[name] = items_.size();
    return *this;
  }
  Assembler& code(const Program& p) {
    for (const Instr& i : p.instrs()) emit(i);
    return *this;
  }

  Program build() const {
    std::vector<Instr> out;
    out.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
      const auto& [instr, target] = items_[i];
      if (target.empty()) {
        out.push_back(instr);
        continue;
      }
      std::size_t t = labels_.at(target);
      if (t == i) throw std::logic_error("jump to itself");
      out.push_back(t > i ? Instr{Op::jump_forward, static_cast<std::uint32_t>(t - i)}
                          : Instr{Op::jump_backward, static_cast<std::uint32_t>(i - t)});
    }
    return Program::from_instrs(std::move(out));
  }

private:
  Assembler& emit(Instr i) {
    items_.push_back({i, {}});
    return *this;
  }
  std::vector<std::pair<Instr, std::string>> items_;
  std::map<std::string, std::size_t> labels_;
};

// ---------------------------------------------------------------------------
// Machine

enum class Variant { standard, fast_assign };

enum class TrmStatus { halted, fuel_exhausted, abnormal_halt };

inline const char* to_string(TrmStatus s) noexcept {
  switch (s) {
    case TrmStatus::halted: return "halted";
    case TrmStatus::fuel_exhausted: return "fuel_exhausted";
    case TrmStatus::abnormal_halt: return "abnormal_halt";
  }
  return "?";
}

struct RunResult {
  std::string output;  // R1 at halt
  std::uint64_t steps = 0;
  TrmStatus status = TrmStatus::halted;
  /// Steps executed before control first reached the watched instruction.
  std::optional<std::uint64_t> watch_steps;
  std::vector<std::string> registers;  // R1.. at stop

  bool halted() const noexcept { return status == TrmStatus::halted; }
};

namespace detail {

class Register {
public:
  Register() = default;
  explicit Register(std::string_view s) : buf_(s) {}

  bool empty() const noexcept { return start_ == buf_.size(); }
  char front() const noexcept { return buf_[start_]; }
  void pop_front() {
    ++start_;
    if (start_ > 4096 && start_ * 2 > buf_.size()) {
      buf_.erase(0, start_);
      start_ = 0;
    }
  }
  void push_back(char c) { buf_.push_back(c); }
  void append(const Register& other) { buf_.append(other.buf_, other.start_, std::string::npos); }
  void clear() {
    buf_.clear();
    start_ = 0;
  }
  std::string str() const { return buf_.substr(start_); }

private:
  std::string buf_;
  std::size_t start_ = 0;
};

}  // namespace detail

/// move(i, j): Rj <- Rj . Ri, Ri <- empty.
inline Program trm_move(std::uint32_t i, std::uint32_t j) {
  if (i == j || i == 0 || j == 0) throw std::invalid_argument("trm_move: need distinct registers >= 1");
  return Program::from_instrs({
      {Op::cases, i},
      {Op::jump_forward, 6},
      {Op::jump_forward, 3},
      {Op::add_hash, j},
      {Op::jump_backward, 4},
      {Op::add_one, j},
      {Op::jump_backward, 6},
  });
}

inline constexpr std::uint32_t fast_move_limit = 8;

namespace detail {

struct MoveBlock {
  std::uint32_t from = 0, to = 0;
};

/// For each instruction index, the move(i, j) block starting there, if any
/// (i, j <= fast_move_limit), by exact match against trm_move's output.
inline std::vector<std::optional<MoveBlock>> find_move_blocks(const Program& p) {
  static const auto table = [] {
    std::vector<std::pair<std::vector<Instr>, MoveBlock>> t;
    for (std::uint32_t i = 1; i <= fast_move_limit; ++i)
      for (std::uint32_t j = 1; j <= fast_move_limit; ++j)
        if (i != j) t.push_back({trm_move(i, j).instrs(), {i, j}});
    return t;
  }();
  const auto& ins = p.instrs();
  std::vector<std::optional<MoveBlock>> out(ins.size());
  for (std::size_t pc = 0; pc + 7 <= ins.size(); ++pc) {
    if (ins[pc].op != Op::cases) continue;
    for (const auto& [code, block] : table) {
      if (std::equal(code.begin(), code.end(), ins.begin() + static_cast<std::ptrdiff_t>(pc))) {
        out[pc] = block;
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Runs p with inputs in R1..Rn. One step per executed instruction; under
/// fast_assign a whole move(i, j) block is a single step. `watch` is a
/// 1-based instruction index (len+1 = the halt point).
inline RunResult trm_run(const Program& p, std::span<const std::string> inputs, std::uint64_t fuel,
                         Variant variant = Variant::standard,
                         std::optional<std::size_t> watch = std::nullopt) {
  if (fuel == 0) throw std::invalid_argument("fuel must be positive");
  std::vector<detail::Register> regs(inputs.size() + 1);
  for (std::size_t i = 0; i < inputs.size(); ++i) regs[i + 1] = detail::Register(inputs[i]);
  auto reg = [&](std::uint32_t n) -> detail::Register& {
    if (n >= regs.size()) regs.resize(n + 1);
    return regs[n];
  };

  std::vector<std::optional<detail::MoveBlock>> blocks;
  if (variant == Variant::fast_assign) blocks = detail::find_move_blocks(p);

  const auto& ins = p.instrs();
  const std::int64_t len = static_cast<std::int64_t>(ins.size());
  std::int64_t pc = 1;
  RunResult r;
  auto check_watch = [&] {
    if (watch && !r.watch_steps && static_cast<std::size_t>(pc) == *watch) r.watch_steps = r.steps;
  };

  for (;;) {
    check_watch();
    if (pc == len + 1) {
      r.status = TrmStatus::halted;
      break;
    }
    if (pc < 1 || pc > len + 1) {
      r.status = TrmStatus::abnormal_halt;
      break;
    }
    if (r.steps == fuel) {
      r.status = TrmStatus::fuel_exhausted;
      break;
    }
    ++r.steps;
    if (!blocks.empty() && blocks[static_cast<std::size_t>(pc - 1)]) {
      const auto& b = *blocks[static_cast<std::size_t>(pc - 1)];
      reg(b.to).append(reg(b.from));
      reg(b.from).clear();
      pc += 7;
      continue;
    }
    const Instr& i = ins[static_cast<std::size_t>(pc - 1)];
    switch (i.op) {
      case Op::add_one: reg(i.n).push_back('1'); ++pc; break;
      case Op::add_hash: reg(i.n).push_back('#'); ++pc; break;
      case Op::jump_forward: pc += i.n; break;
      case Op::jump_backward: pc -= i.n; break;
      case Op::cases: {
        detail::Register& rg = reg(i.n);
        if (rg.empty()) {
          pc += 1;
        } else {
          char c = rg.front();
          rg.pop_front();
          pc += c == '1' ? 2 : 3;
        }
        break;
      }
    }
  }
  r.output = regs.size() > 1 ? regs[1].str() : std::string{};
  for (std::size_t i = 1; i < regs.size(); ++i) r.registers.push_back(regs[i].str());
  return r;
}

inline RunResult trm_run(const Program& p, std::initializer_list<std::string> inputs, std::uint64_t fuel,
                         Variant variant = Variant::standard,
                         std::optional<std::size_t> watch = std::nullopt) {
  return trm_run(p, std::span<const std::string>(inputs.begin(), inputs.size()), fuel, variant, watch);
}

// ---------------------------------------------------------------------------
// Toolkit

/// The program [[write]](x): appends x to R1, one instruction per symbol.
inline Program trm_writer(std::string_view x) {
  Assembler a;
  for (char c : x) a.append_symbol(1, c);
  return a.build();
}

/// Empties register r.
inline Program trm_clear(std::uint32_t r) {
  return Assembler().label("loop").cases(r).jump("end").jump("loop").jump("loop").label("end").build();
}

/// write: x in R1 -> w_x in R1. Uses R1, R2.
inline const Program& trm_write_program() {
  static const Program p = Assembler()
                               .label("loop").cases(1).jump("end").jump("one")
                               .add_one(2).add_hash(2).add_hash(2).jump("loop")
                               .label("one").add_one(2).add_hash(2).jump("loop")
                               .label("end").code(trm_move(2, 1))
                               .build();
  return p;
}

/// diag: r in R1 -> w_r . r in R1, so [[ [[diag]](r) ]]() = [[r]](r).
/// Uses R1, R2, R3.
inline const Program& trm_diag_program() {
  static const Program p = Assembler()
                               .label("loop").cases(1).jump("end").jump("one")
                               .add_one(2).add_hash(2).add_hash(2).add_hash(3).jump("loop")
                               .label("one").add_one(2).add_hash(2).add_one(3).jump("loop")
                               .label("end").code(trm_move(3, 2)).code(trm_move(2, 1))
                               .build();
  return p;
}

/// s11: p in R1, s in R2 -> move(1,2) . w_s . p in R1, built from the
/// toolkit parts:
///   move(1,3) | move(2,1) | write | move(1,2) | [[write]](move(1,2)) | move(2,1) | move(3,1)
inline const Program& trm_s11_program() {
  static const Program p =
      trm_compose({trm_move(1, 3), trm_move(2, 1), trm_write_program(), trm_move(1, 2),
                   trm_writer(trm_move(1, 2).raw()), trm_move(2, 1), trm_move(3, 1)});
  return p;
}

/// Same function as trm_s11_program in a single pass: the literal move(1,2)
/// and the code for s are emitted straight into R3.
inline const Program& trm_s11_fused_program() {
  static const Program p = [] {
    Assembler a;
    const Program relocate = trm_move(1, 2);
    for (char c : relocate.raw()) a.append_symbol(3, c);
    a.label("loop").cases(2).jump("end").jump("one")
        .add_one(3).add_hash(3).add_hash(3).jump("loop")
        .label("one").add_one(3).add_hash(3).jump("loop")
        .label("end").code(trm_move(1, 3)).code(trm_move(3, 1));
    return a.build();
  }();
  return p;
}

/// q in R1 -> q in R1 and R2 (R2, R3 empty beforehand).
inline const Program& trm_duplicate_program() {
  static const Program p = Assembler()
                               .label("loop").cases(1).jump("end").jump("one")
                               .add_hash(2).add_hash(3).jump("loop")
                               .label("one").add_one(2).add_one(3).jump("loop")
                               .label("end").code(trm_move(3, 1))
                               .build();
  return p;
}

/// q^ = diag | move(1,2) | [[write]](move(1,4)) | move(2,1) | [[write]](move(4,2)) | [[write]](p)
inline Program trm_moss_qhat(const Program& p) {
  return trm_compose({trm_diag_program(), trm_move(1, 2), trm_writer(trm_move(1, 4).raw()), trm_move(2, 1),
                      trm_writer(trm_move(4, 2).raw()), trm_writer(p.raw())});
}

inline constexpr std::uint64_t default_construction_fuel = 100'000'000;

inline Program trm_moss_fixpoint(const Program& p, std::uint64_t fuel = default_construction_fuel) {
  Program qhat = trm_moss_qhat(p);
  RunResult r = trm_run(qhat, {qhat.raw()}, fuel);
  if (!r.halted()) throw std::runtime_error("trm_moss_fixpoint: [[q^]](q^) did not halt");
  return trm_parse(r.output);
}

/// p~ with [[p~]](q, d) = [[p]]([[s11]](q, q), d):
///   move(2,4) | duplicate | s11 | move(4,2) | p
inline Program trm_kleene_intermediate(const Program& p) {
  return trm_compose({trm_move(2, 4), trm_duplicate_program(), trm_s11_program(), trm_move(4, 2), p});
}

inline Program trm_kleene_fixpoint(const Program& p, std::uint64_t fuel = default_construction_fuel) {
  Program tilde = trm_kleene_intermediate(p);
  RunResult r = trm_run(trm_s11_program(), {tilde.raw(), tilde.raw()}, fuel);
  if (!r.halted()) throw std::runtime_error("trm_kleene_fixpoint: [[s11]](p~, p~) did not halt");
  return trm_parse(r.output);
}

/// 1-based index of the first instruction of the trailing `p` inside a
/// fixpoint built from it; the cut between setup and p's own work.
inline std::size_t embedded_start(const Program& fixpoint, const Program& p) {
  return fixpoint.size() - p.size() + 1;
}

// Small base programs: p(e, d) with e in R1, d in R2.

/// [[proj1]](e, d) = e
inline Program trm_proj1() { return trm_clear(2); }
/// [[proj2]](e, d) = d
inline Program trm_proj2() { return trm_compose(trm_clear(1), trm_move(2, 1)); }
/// [[concat]](e, d) = e . d
inline Program trm_concat() { return trm_move(2, 1); }

}  // namespace srtkit::trm

#endif  // SRTKIT_TRM_HPP
