// Error types shared across the library.
//
// validation_error: a caller handed us parameters that violate a documented
//   precondition (checked eagerly, so solvers never run on bad input).
// parse_error: malformed scenario config or report text; carries location.
// io_error: filesystem / snapshot format failures.
// solver_error: a time integration produced a non-finite state; the scenario
//   runner converts this into a failed outcome instead of crashing.
#pragma once

#include <stdexcept>
#include <string>

namespace nlks {

struct validation_error : std::invalid_argument {
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct solver_error : std::runtime_error {
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nlks
