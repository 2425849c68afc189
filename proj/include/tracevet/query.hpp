#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tracevet/scalar.hpp"

namespace tracevet {

// A concrete (fully substituted) table-store query. Minimal stand-in for SQL:
// single-table inserts/updates/deletes by primary key and single-column
// comparison selects.
struct Query {
  enum class Kind { Insert, Update, Select, Delete };
  enum class Cmp { Eq, Lt };

  Kind kind = Kind::Select;
  std::string table;
  std::int64_t pk = 0;                              // insert/update/delete
  std::string column;                               // update/select
  Cmp cmp = Cmp::Eq;                                // select
  Scalar value;                                     // update/select
  std::map<std::string, Scalar> row;                // insert columns

  bool is_read() const { return kind == Kind::Select; }

  friend bool operator==(const Query&, const Query&) = default;
};

inline const char* to_string(Query::Cmp c) { return c == Query::Cmp::Eq ? "eq" : "lt"; }

// Canonical single-line text of a query; "lexically identical" for read
// deduplication means equal canonical text.
inline std::string query_text(const Query& q) {
  using detail::b64_field;
  switch (q.kind) {
    case Query::Kind::Insert: {
      std::string s = "ins " + b64_field(q.table) + " " + std::to_string(q.pk);
      for (const auto& [col, val] : q.row) s += " " + b64_field(col) + " " + encode_scalar(val);
      return s;
    }
    case Query::Kind::Update:
      return "upd " + b64_field(q.table) + " " + std::to_string(q.pk) + " " +
             b64_field(q.column) + " " + encode_scalar(q.value);
    case Query::Kind::Select:
      return "sel " + b64_field(q.table) + " " + b64_field(q.column) + " " + to_string(q.cmp) +
             " " + encode_scalar(q.value);
    case Query::Kind::Delete:
      return "del " + b64_field(q.table) + " " + std::to_string(q.pk);
  }
  return "?";
}

// A table row's column values, keyed by column name.
using RowData = std::map<std::string, Scalar>;

// Canonical rendering of a select result. Rows must be pre-sorted by pk; the
// online store and the audit-time versioned store share this function so the
// two paths are byte-comparable.
inline std::string render_row_set(const std::vector<std::pair<std::int64_t, RowData>>& rows) {
  std::string out = "[";
  bool first_row = true;
  for (const auto& [pk, cols] : rows) {
    if (!first_row) out += ",";
    first_row = false;
    out += "{pk=" + std::to_string(pk);
    for (const auto& [name, val] : cols) out += "," + name + "=" + encode_scalar(val);
    out += "}";
  }
  out += "]";
  return out;
}

// Ack returned by write queries; state-independent so re-execution can
// reproduce it without consulting storage.
inline Scalar write_ack() { return Scalar::of_int(1); }

}  // namespace tracevet
