#pragma once

#include <stdexcept>
#include <string>

namespace sliplab {

// Error tags used across the library. Each maps 1:1 to a documented
// failure condition of some operation; see the throwing site for the contract.
enum class errc {
    zero_vector,
    not_in_set,
    not_in_ns,
    gamma_out_of_range,
    unsupported_tau,
    unconstrained,
    incompatible_rotation,
    period_too_coarse,
    strip_not_rigid,
    not_periodic,
    geometry,
    invalid_argument,
};

const char* to_string(errc code);

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

  private:
    errc code_;
};

}  // namespace sliplab
