// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_UTIL_ERROR_H_
#define TLE_UTIL_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace tle {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename... Args>
[[noreturn]] void Fail(Args&&... args) {
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  throw Error(os.str());
}

#define TLE_CHECK(cond, ...)                                  \
  do {                                                        \
    if (!(cond)) ::tle::Fail("check failed: " #cond ": ", __VA_ARGS__); \
  } while (0)

}  // namespace tle

#endif  // TLE_UTIL_ERROR_H_
