#pragma once

// Checked accessors shared by the JSON readers. Every failure is a
// ValidationError carrying a JSON pointer style path.

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "railrecover/io.hpp"

namespace railrecover::jsonread {

inline std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
inline std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline const char* type_name(const Json& j) { return j.type_name(); }

inline void expect_object(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(path, std::string("expected an object, found ") + type_name(j));
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (keys.count(key) == 0) throw ValidationError(child(path, key), "unknown field");
  }
}

inline const Json& require(const Json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(child(path, key), "missing required field");
  return *it;
}

inline std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path, std::string("expected a string, found ") + type_name(j));
  return j.get<std::string>();
}

inline Seconds as_seconds(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<Seconds>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<Seconds>(v);
    throw ValidationError(path, "durations and times must be whole seconds");
  }
  throw ValidationError(path, std::string("expected an integer number of seconds, found ") + type_name(j));
}

inline double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, std::string("expected a number, found ") + type_name(j));
  return j.get<double>();
}

inline bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path, std::string("expected a boolean, found ") + type_name(j));
  return j.get<bool>();
}

inline const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, std::string("expected an array, found ") + type_name(j));
  return j;
}

inline std::vector<std::string> string_list(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_string(j[i], child(path, i)));
  return out;
}

template <class F>
inline void optional_field(const Json& j, const char* key, const std::string& path, F&& f) {
  auto it = j.find(key);
  if (it != j.end()) f(*it, child(path, key));
}

}  // namespace railrecover::jsonread
