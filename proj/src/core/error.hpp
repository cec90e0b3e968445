// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_CORE_ERROR_HPP
#define QUADSIM_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace quadsim {

// Base class for all library errors. Thrown on contract violations,
// malformed inputs and corrupt streams; never on ordinary results.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace quadsim

#endif
