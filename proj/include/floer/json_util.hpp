#pragma once

#include "json.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace floer::json_util {

using json = nlohmann::ordered_json;

/// Throws ParseError naming the first unknown or missing field of `j`.
void expect_fields(const json& j, const std::string& where, std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional = {});

/// Parses text; syntax errors become ParseError with a line number.
json parse(const std::string& text, const std::string& what);

int get_int(const json& j, const char* key, const std::string& where);
std::string get_string(const json& j, const char* key, const std::string& where);
const json& get_array(const json& j, const char* key, const std::string& where);

/// Indented output with arrays of scalars kept on one line.
std::string pretty(const json& j);

}  // namespace floer::json_util

namespace floer {
class SimplicialComplex;
struct FlowCategory;
struct ModuliSpace;
}  // namespace floer

namespace floer::json_util {

/// {vertices, simplices, orientation[, orders]} with increasing simplices;
/// `orders` lists non-increasing local orders aligned with simplices.
json encode_complex(const SimplicialComplex& k);
/// The caller checks `j` for unknown fields.
SimplicialComplex decode_complex(const json& j, const std::string& where);
json encode_vertex_map(const std::vector<int>& map);
std::vector<int> decode_vertex_map(const json& j, const std::string& where);
json encode_moduli(const ModuliSpace& m, const char* source_key, const char* target_key);
ModuliSpace decode_moduli(const json& j, const std::string& where, const char* source_key,
                          const char* target_key, bool with_strata);
json encode_category(const FlowCategory& fc);
FlowCategory decode_category(const json& j, const std::string& where);

}  // namespace floer::json_util
