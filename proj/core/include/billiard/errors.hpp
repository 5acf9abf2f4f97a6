#pragma once

#include <stdexcept>
#include <string>

namespace billiard {

// Every failure condition the library reports, as a stable machine-readable code.
enum class Errc {
  NonSimplePolygon,
  HoleOutsideOuter,
  IrrationalAngle,
  AngleSumViolation,
  DegenerateLine,
  UnknownBasisIndex,
  EmptyInput,
  Overflow,
  ClosureViolation,
  MixedBasis,
  InvalidVertex,
  NoGluingSide,
  UnpairedSide,
  NotBoundaryCell,
  NotTwinSide,
  DegeneratePeriods,
  NoCoprimeSolution,
  ConditionFViolated,
  ZeroQuantumNumber,
  PointOutside,
  UnknownFamily,
  SideNotFound,
  PeriodsNotOrthogonal,
  SymmetryAbsent,
  BadResolution,
  CornerHit,
  TangentHit,
  AdjacentGapTooWide,
  BadParameters,
  NoneFound,
};

// Short stable identifier for an error code (used in CLI diagnostics).
const char* errc_name(Errc code);

// Exception carrying an Errc plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::NonSimplePolygon: return "NonSimplePolygon";
    case Errc::HoleOutsideOuter: return "HoleOutsideOuter";
    case Errc::IrrationalAngle: return "IrrationalAngle";
    case Errc::AngleSumViolation: return "AngleSumViolation";
    case Errc::DegenerateLine: return "DegenerateLine";
    case Errc::UnknownBasisIndex: return "UnknownBasisIndex";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::Overflow: return "Overflow";
    case Errc::ClosureViolation: return "ClosureViolation";
    case Errc::MixedBasis: return "MixedBasis";
    case Errc::InvalidVertex: return "InvalidVertex";
    case Errc::NoGluingSide: return "NoGluingSide";
    case Errc::UnpairedSide: return "UnpairedSide";
    case Errc::NotBoundaryCell: return "NotBoundaryCell";
    case Errc::NotTwinSide: return "NotTwinSide";
    case Errc::DegeneratePeriods: return "DegeneratePeriods";
    case Errc::NoCoprimeSolution: return "NoCoprimeSolution";
    case Errc::ConditionFViolated: return "ConditionFViolated";
    case Errc::ZeroQuantumNumber: return "ZeroQuantumNumber";
    case Errc::PointOutside: return "PointOutside";
    case Errc::UnknownFamily: return "UnknownFamily";
    case Errc::SideNotFound: return "SideNotFound";
    case Errc::PeriodsNotOrthogonal: return "PeriodsNotOrthogonal";
    case Errc::SymmetryAbsent: return "SymmetryAbsent";
    case Errc::BadResolution: return "BadResolution";
    case Errc::CornerHit: return "CornerHit";
    case Errc::TangentHit: return "TangentHit";
    case Errc::AdjacentGapTooWide: return "AdjacentGapTooWide";
    case Errc::BadParameters: return "BadParameters";
    case Errc::NoneFound: return "NoneFound";
  }
  return "UnknownError";
}

}  // namespace billiard
