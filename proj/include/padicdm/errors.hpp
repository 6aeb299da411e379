#pragma once

#include <stdexcept>
#include <string>

namespace padicdm {

enum class Errc {
  InvalidField,
  FieldMismatch,
  DivisionByZeroAtPrecision,
  HenselHypothesisFailed,
  NoConvergence,
  UnsupportedRoot,
  CenterMismatch,
  VariableMismatch,
  NonUnitConstantTerm,
  SubstitutionOutsideDisc,
  NotInvertibleAtOrderOne,
  ShiftOutsideDisc,
  ZeroSeries,
  NotAFiberPoint,
  SingularFiberPoint,
  DegreeMismatch,
  RootsNotInDeclaredField,
  FiberNotReduced,
  NonInvertibleTransition,
  NotEtale,
  DegenerateFiber,
  DimensionMismatch,
  InconsistentRadii,
  CountMismatch,
  SchemaError,
  UnknownExample,
  SelectorError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidField: return "InvalidField";
    case Errc::FieldMismatch: return "FieldMismatch";
    case Errc::DivisionByZeroAtPrecision: return "DivisionByZeroAtPrecision";
    case Errc::HenselHypothesisFailed: return "HenselHypothesisFailed";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::UnsupportedRoot: return "UnsupportedRoot";
    case Errc::CenterMismatch: return "CenterMismatch";
    case Errc::VariableMismatch: return "VariableMismatch";
    case Errc::NonUnitConstantTerm: return "NonUnitConstantTerm";
    case Errc::SubstitutionOutsideDisc: return "SubstitutionOutsideDisc";
    case Errc::NotInvertibleAtOrderOne: return "NotInvertibleAtOrderOne";
    case Errc::ShiftOutsideDisc: return "ShiftOutsideDisc";
    case Errc::ZeroSeries: return "ZeroSeries";
    case Errc::NotAFiberPoint: return "NotAFiberPoint";
    case Errc::SingularFiberPoint: return "SingularFiberPoint";
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::RootsNotInDeclaredField: return "RootsNotInDeclaredField";
    case Errc::FiberNotReduced: return "FiberNotReduced";
    case Errc::NonInvertibleTransition: return "NonInvertibleTransition";
    case Errc::NotEtale: return "NotEtale";
    case Errc::DegenerateFiber: return "DegenerateFiber";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InconsistentRadii: return "InconsistentRadii";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::SchemaError: return "SchemaError";
    case Errc::UnknownExample: return "UnknownExample";
    case Errc::SelectorError: return "SelectorError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace padicdm
