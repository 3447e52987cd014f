#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loopsoup {

enum class Errc {
  BadGraph,
  NonTransient,
  BadForm,
  TooLarge,
  Disconnected,
  EmptyNetwork,
  TailTooHeavy,
  DuplicateIndex,
  BadChi,
  BadSupport,
  SingularTwist,
  NotEulerian,
  BudgetExceeded,
  DisconnectedSupport,
  ZeroNetwork,
  BadPartition,
  EmptyBasis,
  MismatchBeyondTolerance,
  NonIntegral,
  GridTooCoarse,
  BadInput,
};

std::string_view errc_name(Errc code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

} // namespace loopsoup
