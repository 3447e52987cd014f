#include "loopsoup/error.hpp"

namespace loopsoup {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
  case Errc::BadGraph: return "BadGraph";
  case Errc::NonTransient: return "NonTransient";
  case Errc::BadForm: return "BadForm";
  case Errc::TooLarge: return "TooLarge";
  case Errc::Disconnected: return "Disconnected";
  case Errc::EmptyNetwork: return "EmptyNetwork";
  case Errc::TailTooHeavy: return "TailTooHeavy";
  case Errc::DuplicateIndex: return "DuplicateIndex";
  case Errc::BadChi: return "BadChi";
  case Errc::BadSupport: return "BadSupport";
  case Errc::SingularTwist: return "SingularTwist";
  case Errc::NotEulerian: return "NotEulerian";
  case Errc::BudgetExceeded: return "BudgetExceeded";
  case Errc::DisconnectedSupport: return "DisconnectedSupport";
  case Errc::ZeroNetwork: return "ZeroNetwork";
  case Errc::BadPartition: return "BadPartition";
  case Errc::EmptyBasis: return "EmptyBasis";
  case Errc::MismatchBeyondTolerance: return "MismatchBeyondTolerance";
  case Errc::NonIntegral: return "NonIntegral";
  case Errc::GridTooCoarse: return "GridTooCoarse";
  case Errc::BadInput: return "BadInput";
  }
  return "Unknown";
}

} // namespace loopsoup
