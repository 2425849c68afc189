#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace tracevet {

// Reason codes for audit rejection. The verifier always rejects with exactly
// one primary reason so that fault-injection tests can assert which check
// fired.
enum class RejectCode {
  TraceUnbalanced,
  LogUnknownRid,
  LogOpnumRange,
  LogOpnumDuplicate,
  LogOpnumMissing,
  LogOrder,
  Cycle,
  NondetNonmonotonic,
  NondetMismatch,
  OpNotInMap,
  OpMismatch,
  NoPriorWrite,
  DbTxnTooLong,
  Divergence,
  OpCountShortfall,
  Trap,
  OutputMismatch,
};

inline const char* to_string(RejectCode code) {
  switch (code) {
    case RejectCode::TraceUnbalanced: return "trace-unbalanced";
    case RejectCode::LogUnknownRid: return "log-unknown-rid";
    case RejectCode::LogOpnumRange: return "log-opnum-range";
    case RejectCode::LogOpnumDuplicate: return "log-opnum-duplicate";
    case RejectCode::LogOpnumMissing: return "log-opnum-missing";
    case RejectCode::LogOrder: return "log-order";
    case RejectCode::Cycle: return "cycle";
    case RejectCode::NondetNonmonotonic: return "nondet-nonmonotonic";
    case RejectCode::NondetMismatch: return "nondet-mismatch";
    case RejectCode::OpNotInMap: return "op-not-in-map";
    case RejectCode::OpMismatch: return "op-mismatch";
    case RejectCode::NoPriorWrite: return "no-prior-write";
    case RejectCode::DbTxnTooLong: return "db-txn-too-long";
    case RejectCode::Divergence: return "divergence";
    case RejectCode::OpCountShortfall: return "op-count-shortfall";
    case RejectCode::Trap: return "trap";
    case RejectCode::OutputMismatch: return "output-mismatch";
  }
  return "unknown";
}

struct Reject {
  RejectCode code;
  std::string detail;
};

// Outcome of an operation that can fail with an audit rejection. Rejection is
// a normal result of verification, not an exceptional condition; exceptions
// are reserved for malformed input files and misuse.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Reject r) : v_(std::move(r)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  const T& value() const { return std::get<T>(v_); }
  T& value() { return std::get<T>(v_); }
  const Reject& reject() const { return std::get<Reject>(v_); }

 private:
  std::variant<T, Reject> v_;
};

using Status = Result<std::monostate>;

inline Status ok_status() { return Status(std::monostate{}); }

// Final verdict of an audit run.
struct AuditDecision {
  bool accepted = false;
  Reject reason;  // meaningful only when !accepted

  static AuditDecision accept() { return AuditDecision{true, {}}; }
  static AuditDecision reject(Reject r) { return AuditDecision{false, std::move(r)}; }
};

// Thrown on malformed input (program listings, trace/report files) and on
// misconstructed workloads. Maps to CLI exit code 2, distinct from REJECT.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

  std::optional<int> line() const { return line_; }

 private:
  std::optional<int> line_;
};

}  // namespace tracevet
