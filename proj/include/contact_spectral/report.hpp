#pragma once

// Deterministic report emission: an insertion-ordered JSON value tree and a
// CSV table, both printing numbers with 12 significant digits.

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "contact_spectral/util.hpp"

namespace contact_spectral {

class JsonValue {
 public:
  enum class Type { null, boolean, number, integer, string, array, object };

  JsonValue() : type_(Type::null) {}
  static JsonValue null() { return JsonValue(); }
  static JsonValue boolean(bool b) {
    JsonValue v;
    v.type_ = Type::boolean;
    v.bool_ = b;
    return v;
  }
  static JsonValue number(double d) {
    JsonValue v;
    v.type_ = Type::number;
    v.num_ = d;
    return v;
  }
  static JsonValue integer(long long i) {
    JsonValue v;
    v.type_ = Type::integer;
    v.int_ = i;
    return v;
  }
  static JsonValue string(std::string s) {
    JsonValue v;
    v.type_ = Type::string;
    v.str_ = std::move(s);
    return v;
  }
  static JsonValue array() {
    JsonValue v;
    v.type_ = Type::array;
    return v;
  }
  static JsonValue object() {
    JsonValue v;
    v.type_ = Type::object;
    return v;
  }

  JsonValue& set(const std::string& key, JsonValue v) {
    for (auto& kv : members_)
      if (kv.first == key) {
        kv.second = std::move(v);
        return *this;
      }
    members_.emplace_back(key, std::move(v));
    return *this;
  }
  JsonValue& push(JsonValue v) {
    items_.push_back(std::move(v));
    return *this;
  }

  std::string dump(int indent = 0, int depth = 0) const {
    std::ostringstream os;
    write(os, indent, depth);
    return os.str();
  }

 private:
  static void escape(std::ostringstream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
      switch (c) {
        case '"': os << "\\\""; break;
        case '\\': os << "\\\\"; break;
        case '\n': os << "\\n"; break;
        case '\t': os << "\\t"; break;
        case '\r': os << "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            os << buf;
          } else {
            os << c;
          }
      }
    }
    os << '"';
  }

  void write(std::ostringstream& os, int indent, int depth) const {
    std::string pad(indent * (depth + 1), ' ');
    std::string close_pad(indent * depth, ' ');
    const char* nl = indent ? "\n" : "";
    switch (type_) {
      case Type::null: os << "null"; break;
      case Type::boolean: os << (bool_ ? "true" : "false"); break;
      case Type::integer: os << int_; break;
      case Type::number:
        if (std::isnan(num_))
          os << "null";
        else if (std::isinf(num_))
          os << (num_ > 0 ? "\"inf\"" : "\"-inf\"");
        else
          os << format_sig12(num_);
        break;
      case Type::string: escape(os, str_); break;
      case Type::array: {
        if (items_.empty()) {
          os << "[]";
          break;
        }
        os << '[' << nl;
        for (std::size_t i = 0; i < items_.size(); ++i) {
          os << pad;
          items_[i].write(os, indent, depth + 1);
          if (i + 1 < items_.size()) os << ',';
          os << nl;
        }
        os << close_pad << ']';
        break;
      }
      case Type::object: {
        if (members_.empty()) {
          os << "{}";
          break;
        }
        os << '{' << nl;
        for (std::size_t i = 0; i < members_.size(); ++i) {
          os << pad;
          escape(os, members_[i].first);
          os << (indent ? ": " : ":");
          members_[i].second.write(os, indent, depth + 1);
          if (i + 1 < members_.size()) os << ',';
          os << nl;
        }
        os << close_pad << '}';
        break;
      }
    }
  }

  Type type_;
  bool bool_ = false;
  double num_ = 0.0;
  long long int_ = 0;
  std::string str_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> members_;
};

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& add_row(std::vector<std::string> row) {
    rows_.push_back(std::move(row));
    return *this;
  }

  static std::string cell(double v) { return format_sig12(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }

  std::string dump() const {
    std::ostringstream os;
    auto line = [&os](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
      }
      os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return os.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open output path: " + path);
  out << contents;
  if (!out) throw ValidationError("failed writing output path: " + path);
}

}  // namespace contact_spectral
