#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tracevet/query.hpp"
#include "tracevet/scalar.hpp"

namespace tracevet {

enum class Opcode {
  Const,
  Mov,
  Binop,
  Jz,
  Jmp,
  Input,
  Output,
  RegRead,
  RegWrite,
  KvGet,
  KvSet,
  BeginTxn,
  Db,
  EndTxn,
  Time,
  Halt,
};

// Instruction operand: a variable reference or an inline literal.
struct Operand {
  enum class Kind { Var, Lit };
  Kind kind = Kind::Lit;
  std::string var;
  Scalar lit;

  static Operand of_var(std::string name) { return Operand{Kind::Var, std::move(name), {}}; }
  static Operand of_lit(Scalar v) { return Operand{Kind::Lit, {}, std::move(v)}; }
};

// Query with unevaluated operands; variables are substituted at run time.
struct QueryTemplate {
  Query::Kind kind = Query::Kind::Select;
  std::string table;
  Operand pk;
  std::string column;
  Query::Cmp cmp = Query::Cmp::Eq;
  Operand value;
  std::vector<std::pair<std::string, Operand>> row;  // sorted by column name
};

struct Instruction {
  Opcode op = Opcode::Halt;
  std::string dst;        // const/mov/binop/input/regread/kvget/db/time
  BinopKind bop = BinopKind::Add;
  Operand a;              // binop lhs; mov/output src; jz cond; regread/regwrite name; kvget/kvset key
  Operand b;              // binop rhs; regwrite/kvset value
  int target = -1;        // jz/jmp
  std::string param_key;  // input
  QueryTemplate query;    // db
  int line = 0;           // source line, for diagnostics
};

struct Handler {
  std::string name;
  std::vector<Instruction> code;
};

struct Program {
  std::map<std::string, Handler> handlers;

  const Handler* find(const std::string& name) const {
    auto it = handlers.find(name);
    return it == handlers.end() ? nullptr : &it->second;
  }
};

// 64-bit FNV-1a accumulator identifying a request's branch history: folds the
// handler name, then (site index, outcome byte) per executed branch.
struct ControlFlowDigest {
  static constexpr std::uint64_t kBasis = 14695981039346656037ull;
  static constexpr std::uint64_t kPrime = 1099511628211ull;

  std::uint64_t value = kBasis;

  void fold_byte(std::uint8_t b) {
    value ^= b;
    value *= kPrime;
  }
  void fold_name(std::string_view name) {
    for (char c : name) fold_byte(static_cast<std::uint8_t>(c));
  }
  void fold_branch(std::uint32_t site, std::uint8_t outcome) {
    fold_byte(static_cast<std::uint8_t>(site & 0xff));
    fold_byte(static_cast<std::uint8_t>((site >> 8) & 0xff));
    fold_byte(static_cast<std::uint8_t>((site >> 16) & 0xff));
    fold_byte(static_cast<std::uint8_t>((site >> 24) & 0xff));
    fold_byte(outcome);
  }
};

namespace detail {

inline bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline bool is_int_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// Splits a line into raw tokens. Double quotes group spaces into one token and
// may begin mid-token (for `col="a b"` forms); quote characters are kept for
// the operand parser. `#` outside quotes starts a comment.
inline std::vector<std::string> tokenize_line(std::string_view line, int lineno) {
  std::vector<std::string> toks;
  std::string cur;
  bool in_quote = false;
  bool any = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_quote) {
      cur += c;
      if (c == '\\') {
        if (i + 1 >= line.size()) throw ParseError(lineno, "dangling escape");
        cur += line[++i];
      } else if (c == '"') {
        in_quote = false;
      }
      continue;
    }
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      if (any) toks.push_back(cur);
      cur.clear();
      any = false;
      continue;
    }
    cur += c;
    any = true;
    if (c == '"') in_quote = true;
  }
  if (in_quote) throw ParseError(lineno, "unterminated string literal");
  if (any) toks.push_back(cur);
  return toks;
}

inline std::string unescape(std::string_view quoted, int lineno) {
  // quoted includes the surrounding quotes
  if (quoted.size() < 2 || quoted.front() != '"' || quoted.back() != '"')
    throw ParseError(lineno, "bad string literal");
  std::string out;
  for (std::size_t i = 1; i + 1 < quoted.size(); ++i) {
    char c = quoted[i];
    if (c == '\\') {
      char e = quoted[++i];
      if (e == 'n')
        out += '\n';
      else if (e == 't')
        out += '\t';
      else if (e == '"' || e == '\\')
        out += e;
      else
        throw ParseError(lineno, std::string("bad escape '\\") + e + "'");
    } else {
      out += c;
    }
  }
  return out;
}

inline Operand parse_operand(const std::string& tok, int lineno) {
  if (!tok.empty() && tok[0] == '"') return Operand::of_lit(Scalar::of_str(unescape(tok, lineno)));
  if (tok == "true") return Operand::of_lit(Scalar::of_bool(true));
  if (tok == "false") return Operand::of_lit(Scalar::of_bool(false));
  if (is_int_literal(tok)) return Operand::of_lit(Scalar::of_int(std::stoll(tok)));
  if (is_ident(tok)) return Operand::of_var(tok);
  throw ParseError(lineno, "bad operand '" + tok + "'");
}

inline std::string parse_ident(const std::string& tok, int lineno, const char* what) {
  if (!is_ident(tok)) throw ParseError(lineno, std::string("bad ") + what + " '" + tok + "'");
  return tok;
}

inline int parse_index(const std::string& tok, int lineno) {
  if (!is_int_literal(tok) || tok[0] == '-') throw ParseError(lineno, "bad label '" + tok + "'");
  return static_cast<int>(std::stoll(tok));
}

inline QueryTemplate parse_query_template(const std::vector<std::string>& t, std::size_t from,
                                          int lineno) {
  // t[from] is the query kind
  auto need = [&](std::size_t n) {
    if (t.size() != n) throw ParseError(lineno, "bad query arity");
  };
  QueryTemplate q;
  const std::string& kind = t[from];
  if (kind == "insert") {
    if (t.size() < from + 3) throw ParseError(lineno, "bad query arity");
    q.kind = Query::Kind::Insert;
    q.table = parse_ident(t[from + 1], lineno, "table");
    q.pk = parse_operand(t[from + 2], lineno);
    for (std::size_t i = from + 3; i < t.size(); ++i) {
      auto eq = t[i].find('=');
      if (eq == std::string::npos) throw ParseError(lineno, "expected col=value");
      std::string col = parse_ident(t[i].substr(0, eq), lineno, "column");
      Operand val = parse_operand(t[i].substr(eq + 1), lineno);
      for (const auto& [existing, unused] : q.row)
        if (existing == col) throw ParseError(lineno, "duplicate column '" + col + "'");
      q.row.emplace_back(std::move(col), std::move(val));
    }
    std::sort(q.row.begin(), q.row.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
  } else if (kind == "update") {
    need(from + 4);
    q.kind = Query::Kind::Update;
    q.table = parse_ident(t[from + 1], lineno, "table");
    q.pk = parse_operand(t[from + 2], lineno);
    q.column = parse_ident(t[from + 3], lineno, "column");
    q.value = parse_operand(t[from + 4 - 1 + 1 - 1], lineno);  // t[from+4]
  } else if (kind == "select") {
    need(from + 4);
    q.kind = Query::Kind::Select;
    q.table = parse_ident(t[from + 1], lineno, "table");
    q.column = parse_ident(t[from + 2], lineno, "column");
    if (t[from + 3] == "eq")
      q.cmp = Query::Cmp::Eq;
    else if (t[from + 3] == "lt")
      q.cmp = Query::Cmp::Lt;
    else
      throw ParseError(lineno, "bad comparator '" + t[from + 3] + "'");
    q.value = parse_operand(t[from + 4 - 1 + 1 - 1], lineno);  // t[from+4]
  } else if (kind == "delete") {
    need(from + 2);
    q.kind = Query::Kind::Delete;
    q.table = parse_ident(t[from + 1], lineno, "table");
    q.pk = parse_operand(t[from + 2 - 1 + 1 - 1], lineno);  // t[from+2]
  } else {
    throw ParseError(lineno, "bad query kind '" + kind + "'");
  }
  return q;
}

inline void validate_handler(const Handler& h, int handler_line) {
  const auto& code = h.code;
  // Mark instructions strictly inside begin_txn..end_txn blocks (including the
  // end_txn itself); jumps may not target them.
  std::vector<bool> interior(code.size(), false);
  bool open = false;
  for (std::size_t i = 0; i < code.size(); ++i) {
    const Instruction& ins = code[i];
    if (ins.op == Opcode::BeginTxn) {
      if (open) throw ParseError(ins.line, "nested begin_txn");
      open = true;
      continue;
    }
    if (ins.op == Opcode::EndTxn) {
      if (!open) throw ParseError(ins.line, "end_txn without begin_txn");
      open = false;
      interior[i] = true;
      continue;
    }
    if (open) {
      interior[i] = true;
      if (ins.op != Opcode::Const && ins.op != Opcode::Mov && ins.op != Opcode::Binop &&
          ins.op != Opcode::Db)
        throw ParseError(ins.line, "illegal op inside transaction block");
    } else if (ins.op == Opcode::Db) {
      throw ParseError(ins.line, "db outside transaction block");
    }
  }
  if (open) throw ParseError(handler_line, "unclosed begin_txn in handler '" + h.name + "'");
  for (const Instruction& ins : code) {
    if (ins.op != Opcode::Jz && ins.op != Opcode::Jmp) continue;
    if (ins.target < 0 || ins.target >= static_cast<int>(code.size()))
      throw ParseError(ins.line, "invalid jump target " + std::to_string(ins.target));
    if (interior[ins.target])
      throw ParseError(ins.line, "jump into transaction block");
  }
}

}  // namespace detail

// Parses the line-oriented program listing: `handler <name>` opens a handler,
// one instruction per line, `#` comments, jump labels are instruction indices.
inline Program parse_program(std::string_view text) {
  using namespace detail;
  Program prog;
  Handler* cur = nullptr;
  int cur_line = 0;
  int lineno = 0;
  std::size_t pos = 0;
  auto finish = [&]() {
    if (cur) validate_handler(*cur, cur_line);
    cur = nullptr;
  };
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    std::vector<std::string> t = tokenize_line(line, lineno);
    if (t.empty()) continue;
    const std::string& op = t[0];
    auto need = [&](std::size_t n) {
      if (t.size() != n + 1)
        throw ParseError(lineno, "'" + op + "' expects " + std::to_string(n) + " argument(s)");
    };
    if (op == "handler") {
      need(1);
      finish();
      std::string name = parse_ident(t[1], lineno, "handler name");
      auto [it, inserted] = prog.handlers.try_emplace(name, Handler{name, {}});
      if (!inserted) throw ParseError(lineno, "duplicate handler '" + name + "'");
      cur = &it->second;
      cur_line = lineno;
      continue;
    }
    if (!cur) throw ParseError(lineno, "instruction outside handler");
    Instruction ins;
    ins.line = lineno;
    if (op == "const") {
      need(2);
      ins.op = Opcode::Const;
      ins.dst = parse_ident(t[1], lineno, "variable");
      ins.a = parse_operand(t[2], lineno);
      if (ins.a.kind != Operand::Kind::Lit) throw ParseError(lineno, "const expects a literal");
    } else if (op == "mov") {
      need(2);
      ins.op = Opcode::Mov;
      ins.dst = parse_ident(t[1], lineno, "variable");
      ins.a = parse_operand(t[2], lineno);
    } else if (op == "binop") {
      need(4);
      ins.op = Opcode::Binop;
      ins.dst = parse_ident(t[1], lineno, "variable");
      if (t[2] == "add")
        ins.bop = BinopKind::Add;
      else if (t[2] == "sub")
        ins.bop = BinopKind::Sub;
      else if (t[2] == "mul")
        ins.bop = BinopKind::Mul;
      else if (t[2] == "lt")
        ins.bop = BinopKind::Lt;
      else if (t[2] == "eq")
        ins.bop = BinopKind::Eq;
      else if (t[2] == "concat")
        ins.bop = BinopKind::Concat;
      else
        throw ParseError(lineno, "bad binop '" + t[2] + "'");
      ins.a = parse_operand(t[3], lineno);
      ins.b = parse_operand(t[4], lineno);
    } else if (op == "jz") {
      need(2);
      ins.op = Opcode::Jz;
      ins.a = parse_operand(t[1], lineno);
      ins.target = parse_index(t[2], lineno);
    } else if (op == "jmp") {
      need(1);
      ins.op = Opcode::Jmp;
      ins.target = parse_index(t[1], lineno);
    } else if (op == "input") {
      need(2);
      ins.op = Opcode::Input;
      ins.dst = parse_ident(t[1], lineno, "variable");
      ins.param_key = parse_ident(t[2], lineno, "param key");
    } else if (op == "output") {
      need(1);
      ins.op = Opcode::Output;
      ins.a = parse_operand(t[1], lineno);
    } else if (op == "regread") {
      need(2);
      ins.op = Opcode::RegRead;
      ins.dst = parse_ident(t[1], lineno, "variable");
      ins.a = parse_operand(t[2], lineno);
    } else if (op == "regwrite") {
      need(2);
      ins.op = Opcode::RegWrite;
      ins.a = parse_operand(t[1], lineno);
      ins.b = parse_operand(t[2], lineno);
    } else if (op == "kvget") {
      need(2);
      ins.op = Opcode::KvGet;
      ins.dst = parse_ident(t[1], lineno, "variable");
      ins.a = parse_operand(t[2], lineno);
    } else if (op == "kvset") {
      need(2);
      ins.op = Opcode::KvSet;
      ins.a = parse_operand(t[1], lineno);
      ins.b = parse_operand(t[2], lineno);
    } else if (op == "begin_txn") {
      need(0);
      ins.op = Opcode::BeginTxn;
    } else if (op == "end_txn") {
      need(0);
      ins.op = Opcode::EndTxn;
    } else if (op == "db") {
      if (t.size() < 3) throw ParseError(lineno, "'db' expects a destination and a query");
      ins.op = Opcode::Db;
      ins.dst = parse_ident(t[1], lineno, "variable");
      ins.query = parse_query_template(t, 2, lineno);
    } else if (op == "time") {
      need(1);
      ins.op = Opcode::Time;
      ins.dst = parse_ident(t[1], lineno, "variable");
    } else if (op == "halt") {
      need(0);
      ins.op = Opcode::Halt;
    } else {
      throw ParseError(lineno, "unknown opcode '" + op + "'");
    }
    cur->code.push_back(std::move(ins));
  }
  finish();
  return prog;
}

}  // namespace tracevet
