#pragma once

// Strict readers for versioned JSON documents. Every failure is a parameter
// error whose message starts with the dotted field path.

#include "rmt/error.hpp"
#include "rmt/exact.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace rmt::json_util {

using nlohmann::json;

void require_object(const json& j, const std::string& path);
void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& path);

double get_number(const json& j, const char* key, const std::string& path, double fallback);
long get_integer(const json& j, const char* key, const std::string& path, long fallback);
std::string get_string(const json& j, const char* key, const std::string& path, const std::string& fallback);
/// Accepts an integer or a string such as "3/4" or "0.25".
Rational get_rational(const json& j, const char* key, const std::string& path);
Rational to_rational(const json& value, const std::string& path);

json parse_file(const std::string& file);

}  // namespace rmt::json_util
