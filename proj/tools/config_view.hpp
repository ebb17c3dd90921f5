#pragma once

// JSON configuration access with dotted-path diagnostics.  Every getter
// names the exact field it rejects ("problem.V.amplitude", "grid.npts"),
// so a broken experiment file points straight at the offending entry, and
// unknown keys are errors rather than silently ignored settings.

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plpot/error.hpp"

namespace plcli {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  plpot::require(in.good(), "cannot open JSON file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw plpot::Error("malformed JSON in " + path + ": " + e.what());
  }
}

// A cursor into a JSON document that remembers its dotted path.
class View {
 public:
  View(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw plpot::Error("config error at " + label() + ": " + msg);
  }

  bool has(const std::string& key) const {
    return j_->is_object() && j_->contains(key);
  }

  View child(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    if (it == j_->end())
      throw plpot::Error("config error at " + join(key) +
                         ": missing required field");
    return View(*it, join(key));
  }

  std::optional<View> opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return View((*j_)[key], join(key));
  }

  // Rejects keys outside the allowed set so typos surface as errors.
  void check_keys(std::initializer_list<const char*> allowed) const {
    if (j_->is_null()) return;
    if (!j_->is_object()) fail("expected an object");
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      bool known = false;
      for (const char* a : allowed)
        if (it.key() == a) { known = true; break; }
      if (!known)
        throw plpot::Error("config error at " + join(it.key()) +
                           ": unknown field");
    }
  }

  double num() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
  }

  long long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long long>();
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected a boolean");
    return j_->get<bool>();
  }

  std::vector<View> items() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<View> out;
    out.reserve(j_->size());
    for (std::size_t i = 0; i < j_->size(); ++i)
      out.emplace_back((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }

  // Defaulted scalar getters for optional keys.
  double num(const std::string& key, double dflt) const {
    auto c = opt(key);
    return c ? c->num() : dflt;
  }
  long long integer(const std::string& key, long long dflt) const {
    auto c = opt(key);
    return c ? c->integer() : dflt;
  }
  std::string str(const std::string& key, const std::string& dflt) const {
    auto c = opt(key);
    return c ? c->str() : dflt;
  }
  bool boolean(const std::string& key, bool dflt) const {
    auto c = opt(key);
    return c ? c->boolean() : dflt;
  }
  std::vector<double> num_array(const std::string& key,
                                std::vector<double> dflt) const {
    auto c = opt(key);
    if (!c) return dflt;
    std::vector<double> out;
    for (const View& v : c->items()) out.push_back(v.num());
    return out;
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }
  std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* j_;
  std::string path_;
};

}  // namespace plcli
