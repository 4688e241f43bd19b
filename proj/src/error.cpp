#include "nms/error.hpp"

namespace nms {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidPopulation: return "invalid-population";
    case Errc::InvalidPair: return "invalid-pair";
    case Errc::InvalidParams: return "invalid-params";
    case Errc::UndefinedMetric: return "undefined-metric";
    case Errc::RejectedOrder: return "rejected-order";
    case Errc::InvalidOpinion: return "invalid-opinion";
    case Errc::InvalidPeriod: return "invalid-period";
    case Errc::Inconsistency: return "inconsistency";
    case Errc::InsufficientData: return "insufficient-data";
    case Errc::ConfigError: return "config-error";
    case Errc::IoError: return "io-error";
  }
  return "unknown";
}

}  // namespace nms
