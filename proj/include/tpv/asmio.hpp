#pragma once

#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpv/program.hpp"

namespace tpv {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg) {}
};

// Text assembly: one instruction per line, `;` comments, named constants and
// model in a `.directive` header block, labels as `name:`. Branch targets
// may be labels or 0-based instruction indices.
//
//   .name sum
//   .model wordram 8
//   .const a 1
//     assign output_len, 1
//   loop:
//     add sum, sum, M[idx]
//     if idx < end goto loop
//     halt

namespace detail_asm {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool is_ident(const std::string& s) {
  if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline bool is_number(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

struct Token {
  std::vector<std::string> parts;  // whitespace/comma-split fields
};

}  // namespace detail_asm

inline Program parse_program(const std::string& text) {
  using detail_asm::is_ident;
  using detail_asm::is_number;
  using detail_asm::trim;

  Program p;
  std::map<std::string, Int> consts;
  std::map<std::string, int> labels;
  struct Pending {
    int code_line;
    std::string target;
    int src_line;
  };
  std::vector<Pending> fixups;

  // First pass: strip comments, collect label positions.
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::vector<std::pair<int, std::vector<std::string>>> body;  // (src line, fields)

  auto split_fields = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',' || c == ' ' || c == '\t') {
        if (!cur.empty()) {
          out.push_back(cur);
          cur.clear();
        }
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };

  int code_count = 0;
  std::vector<std::pair<int, std::string>> directives;
  while (std::getline(in, raw)) {
    ++lineno;
    auto cut = raw.find(';');
    std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line[0] == '.') {
      directives.emplace_back(lineno, line);
      continue;
    }
    if (line.back() == ':') {
      std::string name = trim(line.substr(0, line.size() - 1));
      if (!is_ident(name)) throw ParseError(lineno, "bad label '" + name + "'");
      if (!labels.emplace(name, code_count).second)
        throw ParseError(lineno, "duplicate label '" + name + "'");
      continue;
    }
    body.emplace_back(lineno, split_fields(line));
    ++code_count;
  }

  for (const auto& [ln, d] : directives) {
    auto fields = split_fields(d);
    if (fields[0] == ".name" && fields.size() == 2) {
      p.name = fields[1];
    } else if (fields[0] == ".model" && fields.size() >= 2) {
      if (fields[1] == "ram" && fields.size() == 2) {
        p.model = Model::Ram;
      } else if (fields[1] == "wordram" && fields.size() == 3 && is_number(fields[2])) {
        p.model = Model::WordRam;
        p.word_bits = static_cast<unsigned>(std::stoul(fields[2]));
      } else {
        throw ParseError(ln, "bad .model directive");
      }
    } else if (fields[0] == ".const" && fields.size() == 3) {
      if (!is_ident(fields[1]) || !is_number(fields[2]))
        throw ParseError(ln, "bad .const directive");
      consts[fields[1]] = Int(fields[2]);
      p.constants.emplace_back(fields[1], Int(fields[2]));
    } else if (fields[0] == ".append_input" && fields.size() == 1) {
      p.append_input = true;
    } else {
      throw ParseError(ln, "unknown directive '" + fields[0] + "'");
    }
  }

  auto parse_operand = [&](int ln, const std::string& s) -> Operand {
    if (is_number(s)) return Operand::literal(Int(s));
    if (s.size() > 3 && (s.rfind("M[", 0) == 0) && s.back() == ']') {
      std::string reg = s.substr(2, s.size() - 3);
      if (!is_ident(reg)) throw ParseError(ln, "bad memory operand '" + s + "'");
      if (consts.count(reg)) throw ParseError(ln, "memory address must be a register");
      return Operand::memref(p.intern_register(reg));
    }
    if (is_ident(s)) {
      auto it = consts.find(s);
      if (it != consts.end()) return Operand::literal(it->second);
      return Operand::regref(p.intern_register(s));
    }
    throw ParseError(ln, "bad operand '" + s + "'");
  };

  auto parse_cmp = [&](int ln, const std::string& s) -> Cmp {
    if (s == "==") return Cmp::Eq;
    if (s == "!=") return Cmp::Ne;
    if (s == "<") return Cmp::Lt;
    if (s == "<=") return Cmp::Le;
    if (s == ">") return Cmp::Gt;
    if (s == ">=") return Cmp::Ge;
    throw ParseError(ln, "bad comparison '" + s + "'");
  };

  for (std::size_t idx = 0; idx < body.size(); ++idx) {
    const auto& [ln, f] = body[idx];
    const std::string& op = f[0];
    Instruction ins;
    auto expect = [&](std::size_t n) {
      if (f.size() != n) throw ParseError(ln, "'" + op + "' expects " + std::to_string(n - 1) +
                                                  " operand(s)");
    };
    if (op == "assign" || op == "load" || op == "store") {
      expect(3);
      ins.op = Opcode::Move;
      ins.dst = parse_operand(ln, f[1]);
      ins.src1 = parse_operand(ln, f[2]);
      if (ins.dst.is_lit()) throw ParseError(ln, "destination must be register or memory");
    } else if (op == "add" || op == "sub") {
      expect(4);
      ins.op = op == "add" ? Opcode::Add : Opcode::Sub;
      ins.dst = parse_operand(ln, f[1]);
      ins.src1 = parse_operand(ln, f[2]);
      ins.src2 = parse_operand(ln, f[3]);
      if (ins.dst.is_lit()) throw ParseError(ln, "destination must be register or memory");
    } else if (op == "rand") {
      expect(3);
      ins.op = Opcode::Rand;
      ins.dst = parse_operand(ln, f[1]);
      ins.src1 = parse_operand(ln, f[2]);
      if (!ins.dst.is_reg()) throw ParseError(ln, "rand destination must be a register");
    } else if (op == "nop") {
      expect(2);
      ins.op = Opcode::Nop;
      ins.src1 = parse_operand(ln, f[1]);
    } else if (op == "if") {
      // if <a> <cmp> <b> goto <target>
      if (f.size() != 6 || f[4] != "goto") throw ParseError(ln, "bad if-goto");
      ins.op = Opcode::Branch;
      ins.src1 = parse_operand(ln, f[1]);
      ins.cmp = parse_cmp(ln, f[2]);
      ins.src2 = parse_operand(ln, f[3]);
      fixups.push_back({static_cast<int>(idx), f[5], ln});
    } else if (op == "goto") {
      expect(2);
      ins.op = Opcode::Jump;
      fixups.push_back({static_cast<int>(idx), f[1], ln});
    } else if (op == "halt") {
      expect(1);
      ins.op = Opcode::Halt;
    } else {
      throw ParseError(ln, "unknown instruction '" + op + "'");
    }
    p.code.push_back(std::move(ins));
  }

  for (const auto& fx : fixups) {
    int target;
    if (detail_asm::is_number(fx.target)) {
      target = std::stoi(fx.target);
    } else {
      auto it = labels.find(fx.target);
      if (it == labels.end()) throw ParseError(fx.src_line, "unknown label '" + fx.target + "'");
      target = it->second;
    }
    p.code[fx.code_line].target = target;
  }
  return p;
}

inline std::string operand_str(const Program& p, const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::Lit: return o.lit.str();
    case Operand::Kind::Reg: return p.registers[o.reg];
    case Operand::Kind::Mem: return "M[" + p.registers[o.reg] + "]";
  }
  return "?";
}

inline std::string serialize_program(const Program& p) {
  std::ostringstream os;
  if (!p.name.empty()) os << ".name " << p.name << "\n";
  if (p.model == Model::WordRam)
    os << ".model wordram " << p.word_bits << "\n";
  else
    os << ".model ram\n";
  for (const auto& [k, v] : p.constants) os << ".const " << k << " " << v << "\n";
  if (p.append_input) os << ".append_input\n";

  std::map<int, std::string> labels;
  for (const auto& ins : p.code)
    if (ins.op == Opcode::Branch || ins.op == Opcode::Jump)
      labels.emplace(ins.target, "L" + std::to_string(ins.target));

  for (std::size_t i = 0; i < p.code.size(); ++i) {
    auto lab = labels.find(static_cast<int>(i));
    if (lab != labels.end()) os << lab->second << ":\n";
    const Instruction& ins = p.code[i];
    os << "  ";
    switch (ins.op) {
      case Opcode::Move:
        if (ins.src1.is_mem())
          os << "load " << operand_str(p, ins.dst) << ", " << operand_str(p, ins.src1);
        else if (ins.dst.is_mem())
          os << "store " << operand_str(p, ins.dst) << ", " << operand_str(p, ins.src1);
        else
          os << "assign " << operand_str(p, ins.dst) << ", " << operand_str(p, ins.src1);
        break;
      case Opcode::Add:
      case Opcode::Sub:
        os << (ins.op == Opcode::Add ? "add " : "sub ") << operand_str(p, ins.dst) << ", "
           << operand_str(p, ins.src1) << ", " << operand_str(p, ins.src2);
        break;
      case Opcode::Rand:
        os << "rand " << operand_str(p, ins.dst) << ", " << operand_str(p, ins.src1);
        break;
      case Opcode::Nop:
        os << "nop " << operand_str(p, ins.src1);
        break;
      case Opcode::Branch:
        os << "if " << operand_str(p, ins.src1) << " " << cmp_str(ins.cmp) << " "
           << operand_str(p, ins.src2) << " goto " << labels.at(ins.target);
        break;
      case Opcode::Jump:
        os << "goto " << labels.at(ins.target);
        break;
      case Opcode::Halt:
        os << "halt";
        break;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace tpv
