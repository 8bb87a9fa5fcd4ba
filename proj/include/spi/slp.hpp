#pragma once

#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "spi/ints.hpp"
#include "spi/sparse_poly.hpp"

namespace spi {

// Branch-free arithmetic program over inputs x0..x{n-1}: a sequence of
// const/add/sub/mul/neg instructions, one designated output. No division.
class Slp {
  public:
    enum class Op { Const, Add, Sub, Mul, Neg };

    struct Instr {
        Op op;
        Int value;      // Const only
        size_t a = 0;   // operand slots; slot < nvars is an input,
        size_t b = 0;   // slot nvars + i is instruction i's result
    };

    Slp(size_t nvars, std::vector<Instr> instrs, size_t out_slot)
        : nvars_(nvars), instrs_(std::move(instrs)), out_slot_(out_slot) {
        for (size_t i = 0; i < instrs_.size(); ++i) {
            const Instr& ins = instrs_[i];
            if (ins.op != Op::Const) {
                check_operand(ins.a, i);
                if (ins.op != Op::Neg) check_operand(ins.b, i);
            }
        }
        check_operand(out_slot_, instrs_.size());
    }

    size_t nvars() const { return nvars_; }
    size_t size() const { return instrs_.size(); }

    Int eval_mod(const std::vector<Int>& point, const Int& m) const {
        if (point.size() != nvars_)
            throw std::invalid_argument("Slp::eval_mod: point arity mismatch");
        if (m < 2) throw std::invalid_argument("Slp::eval_mod: modulus < 2");
        std::vector<Int> slot(nvars_ + instrs_.size());
        for (size_t i = 0; i < nvars_; ++i) slot[i] = floor_mod(point[i], m);
        for (size_t i = 0; i < instrs_.size(); ++i) {
            const Instr& ins = instrs_[i];
            Int& dst = slot[nvars_ + i];
            switch (ins.op) {
                case Op::Const: dst = floor_mod(ins.value, m); break;
                case Op::Add: dst = (slot[ins.a] + slot[ins.b]) % m; break;
                case Op::Sub: dst = floor_mod(slot[ins.a] - slot[ins.b], m); break;
                case Op::Mul: dst = slot[ins.a] * slot[ins.b] % m; break;
                case Op::Neg: dst = floor_mod(-slot[ins.a], m); break;
            }
        }
        return slot[out_slot_];
    }

  private:
    void check_operand(size_t slot, size_t at) const {
        if (slot >= nvars_ + at)
            throw std::invalid_argument("Slp: operand refers past instruction " +
                                        std::to_string(at));
    }

    size_t nvars_;
    std::vector<Instr> instrs_;
    size_t out_slot_;
};

// Text format, line oriented ('#' comments, blank lines skipped):
//   nvars <n>
//   <name> = const <signed-decimal>
//   <name> = add|sub|mul <operand> <operand>
//   <name> = neg <operand>
//   out <operand>
// Operands are x0..x{n-1} or earlier names. 'out' must be the last line.
inline Slp parse_slp(std::istream& in) {
    std::string line;
    int line_no = 0;
    long nvars = -1;
    std::vector<Slp::Instr> instrs;
    std::map<std::string, size_t> names;
    bool have_out = false;
    size_t out_slot = 0;

    auto is_input_name = [](const std::string& tok) {
        if (tok.size() < 2 || tok[0] != 'x') return false;
        for (size_t i = 1; i < tok.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
        return true;
    };

    auto lookup = [&](const std::string& tok) -> size_t {
        if (is_input_name(tok)) {
            long idx = std::stol(tok.substr(1));
            if (idx >= nvars) throw parse_error(line_no, "input " + tok + " out of range");
            return static_cast<size_t>(idx);
        }
        auto it = names.find(tok);
        if (it == names.end()) throw parse_error(line_no, "undefined operand '" + tok + "'");
        return it->second;
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(detail::strip_comment(line));
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (toks.empty()) continue;
        if (have_out) throw parse_error(line_no, "content after 'out'");
        if (nvars < 0) {
            if (toks.size() != 2 || toks[0] != "nvars")
                throw parse_error(line_no, "expected 'nvars <n>'");
            try {
                nvars = std::stol(toks[1]);
            } catch (...) {
                throw parse_error(line_no, "bad variable count");
            }
            if (nvars < 0) throw parse_error(line_no, "bad variable count");
            continue;
        }
        if (toks[0] == "out") {
            if (toks.size() != 2) throw parse_error(line_no, "expected 'out <operand>'");
            out_slot = lookup(toks[1]);
            have_out = true;
            continue;
        }
        if (toks.size() < 4 || toks[1] != "=")
            throw parse_error(line_no, "expected '<name> = <op> ...'");
        const std::string& name = toks[0];
        if (name == "out" || name == "nvars" || names.count(name))
            throw parse_error(line_no, "name '" + name + "' already defined or reserved");
        if (is_input_name(name))
            throw parse_error(line_no, "name '" + name + "' is reserved for inputs");
        Slp::Instr ins;
        const std::string& op = toks[2];
        if (op == "const") {
            if (toks.size() != 4) throw parse_error(line_no, "expected 'const <integer>'");
            ins.op = Slp::Op::Const;
            if (!detail::parse_int_token(toks[3], ins.value))
                throw parse_error(line_no, "bad constant");
        } else if (op == "add" || op == "sub" || op == "mul") {
            if (toks.size() != 5) throw parse_error(line_no, "expected two operands");
            ins.op = op == "add" ? Slp::Op::Add : op == "sub" ? Slp::Op::Sub : Slp::Op::Mul;
            ins.a = lookup(toks[3]);
            ins.b = lookup(toks[4]);
        } else if (op == "neg") {
            if (toks.size() != 4) throw parse_error(line_no, "expected one operand");
            ins.op = Slp::Op::Neg;
            ins.a = lookup(toks[3]);
        } else {
            throw parse_error(line_no, "unknown op '" + op + "'");
        }
        names[name] = nvars + instrs.size();
        instrs.push_back(std::move(ins));
    }
    if (nvars < 0) throw parse_error(line_no, "missing 'nvars' header");
    if (!have_out) throw parse_error(line_no, "missing 'out' line");
    return Slp(static_cast<size_t>(nvars), std::move(instrs), out_slot);
}

inline Slp parse_slp(const std::string& text) {
    std::istringstream is(text);
    return parse_slp(is);
}

}  // namespace spi
