#include "floer/json_util.hpp"

#include "floer/errors.hpp"

#include <algorithm>
#include <set>

namespace floer::json_util {

void expect_fields(const json& j, const std::string& where, std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  std::set<std::string> known;
  for (const char* k : required) {
    known.insert(k);
    if (!j.contains(k)) throw ParseError(where + "." + k, "missing field");
  }
  for (const char* k : optional) known.insert(k);
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ParseError(where + "." + k, "unknown field");
}

json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
    throw ParseError(what, "syntax error", line);
  }
}

int get_int(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ParseError(where + "." + key, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ParseError(where + "." + key, "expected a string");
  return v.get<std::string>();
}

const json& get_array(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ParseError(where + "." + key, "expected an array");
  return v;
}

namespace {

bool scalar_array(const json& j) {
  return j.is_array() &&
         std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
}

void write(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += inner + json(k).dump() + ": ";
      write(v, indent + 1, out);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array() && !scalar_array(j)) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += inner;
      write(j[i], indent + 1, out);
    }
    out += "\n" + pad + "]";
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string pretty(const json& j) {
  std::string out;
  write(j, 0, out);
  return out + "\n";
}

}  // namespace floer::json_util
