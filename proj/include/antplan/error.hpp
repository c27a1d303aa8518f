#pragma once

#include <stdexcept>
#include <string>

namespace antplan {

enum class ErrorKind {
  InvalidWorld,
  CellOutOfBounds,
  CellBlocked,
  UnknownEntity,
  InapplicableAction,
  NoLegalPerturbation,
  Unsolvable,
  BudgetExhausted,
  UnimposablePredicate,
  InvalidDistribution,
  ShapeMismatch,
  UnknownName,
  EmptyDataset,
  NonfiniteLoss,
  InfeasibleConfig,
  NoFeasibleTasks,
  MixedLengthInputs,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by anticipatory-cost evaluation; carries the failing distribution entry.
class UnsolvableTask : public Error {
 public:
  UnsolvableTask(std::size_t entry, const std::string& label, const std::string& why)
      : Error(ErrorKind::Unsolvable,
              "distribution entry " + std::to_string(entry) + " (" + label + "): " + why),
        entry_(entry) {}
  std::size_t entry() const { return entry_; }

 private:
  std::size_t entry_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidWorld: return "invalid-world";
    case ErrorKind::CellOutOfBounds: return "cell-out-of-bounds";
    case ErrorKind::CellBlocked: return "cell-blocked";
    case ErrorKind::UnknownEntity: return "unknown-entity";
    case ErrorKind::InapplicableAction: return "inapplicable-action";
    case ErrorKind::NoLegalPerturbation: return "no-legal-perturbation";
    case ErrorKind::Unsolvable: return "unsolvable";
    case ErrorKind::BudgetExhausted: return "budget-exhausted";
    case ErrorKind::UnimposablePredicate: return "unimposable-predicate";
    case ErrorKind::InvalidDistribution: return "invalid-distribution";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::UnknownName: return "unknown-name";
    case ErrorKind::EmptyDataset: return "empty-dataset";
    case ErrorKind::NonfiniteLoss: return "nonfinite-loss";
    case ErrorKind::InfeasibleConfig: return "infeasible-config";
    case ErrorKind::NoFeasibleTasks: return "no-feasible-tasks";
    case ErrorKind::MixedLengthInputs: return "mixed-length-inputs";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Io: return "io";
  }
  return "error";
}

}  // namespace antplan
