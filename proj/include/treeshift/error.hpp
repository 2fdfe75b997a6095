#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treeshift {

enum class Errc {
  // input files
  MalformedInput,
  // tree construction
  CircuitDetected,
  MultipleParents,
  MultipleRoots,
  LeafWithoutRay,
  Disconnected,
  RayLeafHasChildren,
  InvalidVertexId,
  // queries
  UnknownVertex,
  HorizonExceeded,
  AncestorOutOfRange,
  IndexOutOfRange,
  // operators
  InvalidQ,
  InvalidHorizon,
  NonIntegerQ,
  TruncationLoss,
  NotInKernel,
  OutsideDisc,
  WrongQ,
  NotEquivalent,
  DimensionMismatch,
  DomainError,
};

constexpr std::string_view errc_name(Errc e) noexcept {
  switch (e) {
    case Errc::MalformedInput: return "MalformedInput";
    case Errc::CircuitDetected: return "CircuitDetected";
    case Errc::MultipleParents: return "MultipleParents";
    case Errc::MultipleRoots: return "MultipleRoots";
    case Errc::LeafWithoutRay: return "LeafWithoutRay";
    case Errc::Disconnected: return "Disconnected";
    case Errc::RayLeafHasChildren: return "RayLeafHasChildren";
    case Errc::InvalidVertexId: return "InvalidVertexId";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::HorizonExceeded: return "HorizonExceeded";
    case Errc::AncestorOutOfRange: return "AncestorOutOfRange";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::InvalidQ: return "InvalidQ";
    case Errc::InvalidHorizon: return "InvalidHorizon";
    case Errc::NonIntegerQ: return "NonIntegerQ";
    case Errc::TruncationLoss: return "TruncationLoss";
    case Errc::NotInKernel: return "NotInKernel";
    case Errc::OutsideDisc: return "OutsideDisc";
    case Errc::WrongQ: return "WrongQ";
    case Errc::NotEquivalent: return "NotEquivalent";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DomainError: return "DomainError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace treeshift
