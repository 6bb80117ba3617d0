#include "core/toml.hpp"

#include <cctype>
#include <cstdlib>

namespace pencilkit::toml {

namespace {

[[noreturn]] void bad(size_t line, const std::string& message) {
  throw Error(ErrorCode::ConfigError,
              "problem file line " + std::to_string(line) + ": " + message);
}

}  // namespace

const std::string& Value::as_string() const {
  if (!is_string())
    throw Error(ErrorCode::ConfigError, "expected a string value");
  return std::get<std::string>(data_);
}

double Value::as_number() const {
  if (!is_number())
    throw Error(ErrorCode::ConfigError, "expected a numeric value");
  return std::get<double>(data_);
}

bool Value::as_bool() const {
  if (!is_bool())
    throw Error(ErrorCode::ConfigError, "expected a boolean value");
  return std::get<bool>(data_);
}

const Array& Value::as_array() const {
  if (!is_array())
    throw Error(ErrorCode::ConfigError, "expected an array value");
  return std::get<Array>(data_);
}

const Table& Value::as_table() const {
  if (!is_table())
    throw Error(ErrorCode::ConfigError, "expected a table value");
  return std::get<Table>(data_);
}

Table& Value::as_table() {
  if (!is_table())
    throw Error(ErrorCode::ConfigError, "expected a table value");
  return std::get<Table>(data_);
}

namespace {

struct Reader {
  const std::string& text;
  size_t pos = 0;
  size_t line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') ++line;
    ++pos;
  }

  // skips spaces and comments; newlines only when `across_lines`
  void skip(bool across_lines) {
    while (!done()) {
      const char c = peek();
      if (c == '#') {
        while (!done() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '\n' && across_lines) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string read_bare_key() {
    std::string key;
    while (!done() &&
           (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
            peek() == '-')) {
      key += peek();
      advance();
    }
    if (key.empty()) bad(line, "expected a key");
    return key;
  }

  std::string read_string() {
    advance();  // opening quote
    std::string out;
    while (true) {
      if (done()) bad(line, "unterminated string");
      const char c = peek();
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        if (done()) bad(line, "unterminated escape");
        const char e = peek();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: bad(line, "unsupported escape sequence");
        }
        advance();
      } else if (c == '\n') {
        bad(line, "newline inside a string");
      } else {
        out += c;
        advance();
      }
    }
  }

  Value read_value() {
    skip(false);
    if (done()) bad(line, "expected a value");
    const char c = peek();
    if (c == '"') return Value(read_string());
    if (c == '[') return read_array();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string word = read_bare_key();
      if (word == "true") return Value(true);
      if (word == "false") return Value(false);
      bad(line, "unexpected word '" + word + "'");
    }
    return read_number();
  }

  Value read_array() {
    advance();  // '['
    Array items;
    while (true) {
      skip(true);
      if (done()) bad(line, "unterminated array");
      if (peek() == ']') {
        advance();
        return Value(std::move(items));
      }
      items.push_back(read_value());
      skip(true);
      if (done()) bad(line, "unterminated array");
      if (peek() == ',') {
        advance();
      } else if (peek() != ']') {
        bad(line, "expected ',' or ']' in array");
      }
    }
  }

  Value read_number() {
    const size_t start = pos;
    if (!done() && (peek() == '+' || peek() == '-')) advance();
    bool any = false;
    auto digits = [&] {
      while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
        advance();
        any = true;
      }
    };
    digits();
    if (!done() && peek() == '.') {
      advance();
      digits();
    }
    if (!done() && (peek() == 'e' || peek() == 'E')) {
      advance();
      if (!done() && (peek() == '+' || peek() == '-')) advance();
      digits();
    }
    if (!any) bad(line, "expected a number");
    const std::string token = text.substr(start, pos - start);
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) bad(line, "malformed number");
    return Value(value);
  }

  // "a.b.c" after '[' or '[['
  std::vector<std::string> read_header_path() {
    std::vector<std::string> path;
    while (true) {
      skip(false);
      path.push_back(read_bare_key());
      skip(false);
      if (!done() && peek() == '.') {
        advance();
        continue;
      }
      return path;
    }
  }
};

Table* descend(Table* root, const std::vector<std::string>& path, size_t line,
               bool array_leaf) {
  Table* current = root;
  for (size_t i = 0; i < path.size(); ++i) {
    const std::string& key = path[i];
    const bool leaf = (i + 1 == path.size());
    auto it = current->find(key);
    if (leaf && array_leaf) {
      if (it == current->end())
        it = current->emplace(key, Value(Array{})).first;
      if (!it->second.is_array())
        bad(line, "'" + key + "' is not an array of tables");
      Array copy = it->second.as_array();
      copy.push_back(Value(Table{}));
      it->second = Value(std::move(copy));
      // return pointer into the stored array's new element
      auto& stored = const_cast<Array&>(it->second.as_array());
      return &stored.back().as_table();
    }
    if (it == current->end()) it = current->emplace(key, Value(Table{})).first;
    if (it->second.is_array()) {
      auto& stored = const_cast<Array&>(it->second.as_array());
      if (stored.empty() || !stored.back().is_table())
        bad(line, "'" + key + "' is not a table");
      current = &stored.back().as_table();
    } else {
      if (!it->second.is_table()) bad(line, "'" + key + "' is not a table");
      current = &it->second.as_table();
    }
  }
  return current;
}

}  // namespace

Table parse(const std::string& text) {
  Reader r{text};
  Table root;
  Table* current = &root;
  while (true) {
    r.skip(true);
    if (r.done()) return root;
    const char c = r.peek();
    if (c == '[') {
      r.advance();
      bool array_header = false;
      if (!r.done() && r.peek() == '[') {
        array_header = true;
        r.advance();
      }
      const auto path = r.read_header_path();
      r.skip(false);
      if (r.done() || r.peek() != ']') bad(r.line, "expected ']'");
      r.advance();
      if (array_header) {
        if (r.done() || r.peek() != ']')
          bad(r.line, "expected ']]' to close the header");
        r.advance();
      }
      current = descend(&root, path, r.line, array_header);
      continue;
    }
    const std::string key = r.read_bare_key();
    r.skip(false);
    if (r.done() || r.peek() != '=') bad(r.line, "expected '=' after key");
    r.advance();
    Value value = r.read_value();
    if (current->count(key)) bad(r.line, "duplicate key '" + key + "'");
    current->emplace(key, std::move(value));
  }
}

const Value* find(const Table& table, const std::string& key) {
  auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

const Table* find_table(const Table& table, const std::string& key) {
  const Value* v = find(table, key);
  if (!v) return nullptr;
  return &v->as_table();
}

std::string require_string(const Table& table, const std::string& key,
                           const std::string& where) {
  const Value* v = find(table, key);
  if (!v || !v->is_string())
    throw Error(ErrorCode::ConfigError,
                where + " needs a string '" + key + "'");
  return v->as_string();
}

double require_number(const Table& table, const std::string& key,
                      const std::string& where) {
  const Value* v = find(table, key);
  if (!v || !v->is_number())
    throw Error(ErrorCode::ConfigError,
                where + " needs a number '" + key + "'");
  return v->as_number();
}

double number_or(const Table& table, const std::string& key, double fallback) {
  const Value* v = find(table, key);
  if (!v) return fallback;
  return v->as_number();
}

}  // namespace pencilkit::toml
