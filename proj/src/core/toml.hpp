#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "core/error.hpp"

namespace pencilkit::toml {

// Minimal TOML reader covering what problem files use: table headers
// (including [[array-of-tables]]), bare keys, strings, numbers, booleans,
// nested (possibly multiline) arrays and comments.  No inline tables,
// dates or multiline strings.
class Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

class Value {
 public:
  Value() : data_(std::monostate{}) {}
  explicit Value(std::string s) : data_(std::move(s)) {}
  explicit Value(double d) : data_(d) {}
  explicit Value(bool b) : data_(b) {}
  explicit Value(Array a) : data_(std::move(a)) {}
  explicit Value(Table t) : data_(std::move(t)) {}

  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_number() const { return std::holds_alternative<double>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_array() const { return std::holds_alternative<Array>(data_); }
  bool is_table() const { return std::holds_alternative<Table>(data_); }

  const std::string& as_string() const;
  double as_number() const;
  bool as_bool() const;
  const Array& as_array() const;
  const Table& as_table() const;
  Table& as_table();

 private:
  std::variant<std::monostate, std::string, double, bool, Array, Table> data_;
};

Table parse(const std::string& text);

// Lookup helpers; `where` names the block for error messages.
const Value* find(const Table& table, const std::string& key);
const Table* find_table(const Table& table, const std::string& key);
std::string require_string(const Table& table, const std::string& key,
                           const std::string& where);
double require_number(const Table& table, const std::string& key,
                      const std::string& where);
double number_or(const Table& table, const std::string& key, double fallback);

}  // namespace pencilkit::toml
