#pragma once

#include <stdexcept>
#include <string>

namespace s3o {

// Sampling support is empty: every candidate cell has zero weight.
struct EmptySupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optimizer asked for samples past its generation budget.
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A task action was applied in a state that does not satisfy its
// preconditions; `fact` names the violated precondition.
struct PreconditionViolation : std::runtime_error {
  explicit PreconditionViolation(std::string fact_)
      : std::runtime_error("precondition violation: " + fact_), fact(std::move(fact_)) {}
  std::string fact;
};

// Every grounding of a task sequence came back unreachable or unscorable.
struct InfeasibleSequence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario generation hit the degenerate-layout retry cap.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace s3o
