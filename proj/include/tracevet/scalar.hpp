#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "tracevet/result.hpp"

namespace tracevet {

// Dynamically typed runtime value: int64, bool, utf8 string, or ABSENT (the
// result of reading never-written state). No floating point.
class Scalar {
 public:
  struct AbsentT {
    friend bool operator==(const AbsentT&, const AbsentT&) = default;
  };
  enum class Type { Absent, Int, Bool, Str };

  Scalar() : v_(AbsentT{}) {}

  static Scalar absent() { return Scalar(); }
  static Scalar of_int(std::int64_t i) { return Scalar(Storage(std::in_place_index<1>, i)); }
  static Scalar of_bool(bool b) { return Scalar(Storage(std::in_place_index<2>, b)); }
  static Scalar of_str(std::string s) {
    return Scalar(Storage(std::in_place_index<3>, std::move(s)));
  }

  Type type() const { return static_cast<Type>(v_.index()); }
  bool is_absent() const { return type() == Type::Absent; }
  std::int64_t as_int() const { return std::get<1>(v_); }
  bool as_bool() const { return std::get<2>(v_); }
  const std::string& as_str() const { return std::get<3>(v_); }

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  using Storage = std::variant<AbsentT, std::int64_t, bool, std::string>;
  explicit Scalar(Storage v) : v_(std::move(v)) {}
  Storage v_;
};

inline const char* type_name(Scalar::Type t) {
  switch (t) {
    case Scalar::Type::Absent: return "absent";
    case Scalar::Type::Int: return "int";
    case Scalar::Type::Bool: return "bool";
    case Scalar::Type::Str: return "str";
  }
  return "?";
}

enum class BinopKind { Add, Sub, Mul, Lt, Eq, Concat };

inline const char* to_string(BinopKind k) {
  switch (k) {
    case BinopKind::Add: return "add";
    case BinopKind::Sub: return "sub";
    case BinopKind::Mul: return "mul";
    case BinopKind::Lt: return "lt";
    case BinopKind::Eq: return "eq";
    case BinopKind::Concat: return "concat";
  }
  return "?";
}

namespace detail {

// Wrapping arithmetic keeps every binop total on its accepted types, so a
// program's behavior is a function of its inputs alone.
inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

}  // namespace detail

inline Result<Scalar> eval_binop(BinopKind op, const Scalar& a, const Scalar& b) {
  auto trap = [&](const char* what) {
    return Result<Scalar>(Reject{RejectCode::Trap,
                                 std::string(what) + " in " + to_string(op) + " (" +
                                     type_name(a.type()) + ", " + type_name(b.type()) + ")"});
  };
  switch (op) {
    case BinopKind::Add:
    case BinopKind::Sub:
    case BinopKind::Mul: {
      if (a.type() != Scalar::Type::Int || b.type() != Scalar::Type::Int)
        return trap("non-int operand");
      std::int64_t r = op == BinopKind::Add   ? detail::wrap_add(a.as_int(), b.as_int())
                       : op == BinopKind::Sub ? detail::wrap_sub(a.as_int(), b.as_int())
                                              : detail::wrap_mul(a.as_int(), b.as_int());
      return Result<Scalar>(Scalar::of_int(r));
    }
    case BinopKind::Lt: {
      if (a.type() == Scalar::Type::Int && b.type() == Scalar::Type::Int)
        return Result<Scalar>(Scalar::of_bool(a.as_int() < b.as_int()));
      if (a.type() == Scalar::Type::Str && b.type() == Scalar::Type::Str)
        return Result<Scalar>(Scalar::of_bool(a.as_str() < b.as_str()));
      return trap("unordered operand");
    }
    case BinopKind::Eq: {
      if (a.type() != b.type() || a.is_absent()) return trap("mixed-type operand");
      return Result<Scalar>(Scalar::of_bool(a == b));
    }
    case BinopKind::Concat: {
      if (a.type() != Scalar::Type::Str || b.type() != Scalar::Type::Str)
        return trap("non-str operand");
      return Result<Scalar>(Scalar::of_str(a.as_str() + b.as_str()));
    }
  }
  return trap("bad opcode");
}

// Rendering used by `output`: the response is the UTF-8 concatenation of
// rendered operands in program order.
inline Result<std::string> render_scalar(const Scalar& v) {
  switch (v.type()) {
    case Scalar::Type::Absent:
      return Result<std::string>(Reject{RejectCode::Trap, "output of absent value"});
    case Scalar::Type::Int: return Result<std::string>(std::to_string(v.as_int()));
    case Scalar::Type::Bool: return Result<std::string>(std::string(v.as_bool() ? "true" : "false"));
    case Scalar::Type::Str: return Result<std::string>(v.as_str());
  }
  return Result<std::string>(Reject{RejectCode::Trap, "output of bad value"});
}

namespace detail {

inline constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string b64_encode(std::string_view in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= in.size()) {
    std::uint32_t n = (static_cast<unsigned char>(in[i]) << 16) |
                      (static_cast<unsigned char>(in[i + 1]) << 8) |
                      static_cast<unsigned char>(in[i + 2]);
    out += kB64Alphabet[(n >> 18) & 63];
    out += kB64Alphabet[(n >> 12) & 63];
    out += kB64Alphabet[(n >> 6) & 63];
    out += kB64Alphabet[n & 63];
    i += 3;
  }
  std::size_t rem = in.size() - i;
  if (rem == 1) {
    std::uint32_t n = static_cast<unsigned char>(in[i]) << 16;
    out += kB64Alphabet[(n >> 18) & 63];
    out += kB64Alphabet[(n >> 12) & 63];
    out += "==";
  } else if (rem == 2) {
    std::uint32_t n = (static_cast<unsigned char>(in[i]) << 16) |
                      (static_cast<unsigned char>(in[i + 1]) << 8);
    out += kB64Alphabet[(n >> 18) & 63];
    out += kB64Alphabet[(n >> 12) & 63];
    out += kB64Alphabet[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

inline int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

inline std::string b64_decode(std::string_view in) {
  if (in.size() % 4 != 0) throw ParseError("bad base64 length");
  std::string out;
  out.reserve(in.size() / 4 * 3);
  for (std::size_t i = 0; i < in.size(); i += 4) {
    int pad = 0;
    int vals[4];
    for (int j = 0; j < 4; ++j) {
      char c = in[i + j];
      if (c == '=') {
        if (i + 4 != in.size() || j < 2) throw ParseError("bad base64 padding");
        ++pad;
        vals[j] = 0;
      } else {
        if (pad > 0) throw ParseError("bad base64 padding");
        vals[j] = b64_value(c);
        if (vals[j] < 0) throw ParseError("bad base64 character");
      }
    }
    std::uint32_t n = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out += static_cast<char>((n >> 16) & 0xff);
    if (pad < 2) out += static_cast<char>((n >> 8) & 0xff);
    if (pad < 1) out += static_cast<char>(n & 0xff);
  }
  return out;
}

// Field encoding for strings that may contain spaces; "-" stands for empty.
inline std::string b64_field(std::string_view s) {
  if (s.empty()) return "-";
  return b64_encode(s);
}

inline std::string b64_unfield(std::string_view s) {
  if (s == "-") return "";
  return b64_decode(s);
}

}  // namespace detail

// Space-free token encoding for scalars, used by the trace and report file
// formats: `_` absent, `i<dec>` int, `bT`/`bF` bool, `s<base64>` string.
inline std::string encode_scalar(const Scalar& v) {
  switch (v.type()) {
    case Scalar::Type::Absent: return "_";
    case Scalar::Type::Int: return "i" + std::to_string(v.as_int());
    case Scalar::Type::Bool: return v.as_bool() ? "bT" : "bF";
    case Scalar::Type::Str: return "s" + detail::b64_encode(v.as_str());
  }
  return "_";
}

inline Scalar decode_scalar(std::string_view tok) {
  if (tok == "_") return Scalar::absent();
  if (tok.size() >= 1 && tok[0] == 'i') {
    std::string body(tok.substr(1));
    try {
      std::size_t used = 0;
      std::int64_t v = std::stoll(body, &used);
      if (used != body.size() || body.empty()) throw ParseError("bad int token");
      return Scalar::of_int(v);
    } catch (const ParseError&) {
      throw;
    } catch (...) {
      throw ParseError("bad int token '" + std::string(tok) + "'");
    }
  }
  if (tok == "bT") return Scalar::of_bool(true);
  if (tok == "bF") return Scalar::of_bool(false);
  if (!tok.empty() && tok[0] == 's') return Scalar::of_str(detail::b64_decode(tok.substr(1)));
  throw ParseError("bad scalar token '" + std::string(tok) + "'");
}

}  // namespace tracevet
