#pragma once

#include "uncertain_dx/error.hpp"

#include <json.hpp>

#include <cstddef>
#include <istream>
#include <iterator>
#include <string>
#include <string_view>

namespace udx::detail {

using Json = nlohmann::ordered_json;

inline std::string read_all(std::istream& in)
{
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Converts a byte offset reported by the JSON parser into "line L, column C".
inline std::string location_of(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        }
        else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

inline Json parse_document(std::istream& in, std::string_view what)
{
    const std::string text = read_all(in);
    try {
        return Json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e) {
        // The parser reports the byte just past the offending token.
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw Error(ErrorCode::ParseError,
                    std::string(what) + " " + location_of(text, byte) + ": malformed JSON");
    }
}

[[noreturn]] inline void field_error(const std::string& path, const std::string& message)
{
    throw Error(ErrorCode::ParseError, "at " + path + ": " + message);
}

inline const Json& require(const Json& object, const char* key, const std::string& path)
{
    if (!object.is_object()) {
        field_error(path.empty() ? "/" : path, "expected an object");
    }
    const auto it = object.find(key);
    if (it == object.end()) {
        field_error(path + "/" + key, "missing required field");
    }
    return *it;
}

inline std::string as_string(const Json& value, const std::string& path)
{
    if (!value.is_string()) {
        field_error(path, "expected a string");
    }
    return value.get<std::string>();
}

inline double as_number(const Json& value, const std::string& path)
{
    if (!value.is_number()) {
        field_error(path, "expected a number");
    }
    return value.get<double>();
}

inline const Json& as_array(const Json& value, const std::string& path)
{
    if (!value.is_array()) {
        field_error(path.empty() ? "/" : path, "expected an array");
    }
    return value;
}

inline const Json& as_object(const Json& value, const std::string& path)
{
    if (!value.is_object()) {
        field_error(path, "expected an object");
    }
    return value;
}

}  // namespace udx::detail
