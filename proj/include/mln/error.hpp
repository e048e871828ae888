#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mln {

enum class Errc {
  invalid_partition,
  out_of_range,
  schema,
  duplicate_record,
  value,
  precondition,
  arity,
  universe,
  shape,
  training,
  fit,
  spec,
  parameter,
  io,
  mismatch,
  invalid_input,
};

std::string_view to_string(Errc code);

// Every recoverable failure in the library is reported through this type; the
// code lets callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mln
