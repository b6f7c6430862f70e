#include "rmt/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rmt::json_util {

namespace {

std::string field(const std::string& path, const char* key) { return path + "." + key; }

}  // namespace

void require_object(const json& j, const std::string& path) {
  require(j.is_object(), ErrorKind::parameter, path + ": expected an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    require(known, ErrorKind::parameter, path + "." + key + ": unknown field");
  }
}

double get_number(const json& j, const char* key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  require(v.is_number(), ErrorKind::parameter, field(path, key) + ": expected a number");
  const double x = v.get<double>();
  require(std::isfinite(x), ErrorKind::parameter, field(path, key) + ": must be finite");
  return x;
}

long get_integer(const json& j, const char* key, const std::string& path, long fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  require(v.is_number_integer(), ErrorKind::parameter, field(path, key) + ": expected an integer");
  return v.get<long>();
}

std::string get_string(const json& j, const char* key, const std::string& path, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  require(v.is_string(), ErrorKind::parameter, field(path, key) + ": expected a string");
  return v.get<std::string>();
}

Rational to_rational(const json& value, const std::string& path) {
  if (value.is_number_integer()) return Rational(value.get<long long>());
  require(value.is_string(), ErrorKind::parameter,
          path + ": expected an integer or a rational string such as \"1/2\"");
  try {
    return parse_rational(value.get<std::string>());
  } catch (const Error& e) {
    fail(ErrorKind::parameter, path + ": " + e.what());
  }
}

Rational get_rational(const json& j, const char* key, const std::string& path) {
  require(j.contains(key), ErrorKind::parameter, field(path, key) + ": missing");
  return to_rational(j.at(key), field(path, key));
}

json parse_file(const std::string& file) {
  std::ifstream in(file);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open config file '" + file + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parameter, file + ": invalid JSON: " + e.what());
  }
}

}  // namespace rmt::json_util
