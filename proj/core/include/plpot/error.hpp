#pragma once

#include <stdexcept>
#include <string>

namespace plpot {

// Thrown on precondition violations (bad grids, mismatched domains,
// unsupported parameter ranges). Diagnostic checks that merely fail
// return reports instead of throwing.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace plpot
