#pragma once

#include <stdexcept>
#include <string>

namespace halfint {

// Pole of Gamma hit at a non-positive integer; `index` is the pole -n.
struct pole_error : std::domain_error {
    long index;
    explicit pole_error(long n)
        : std::domain_error("gamma pole at non-positive integer " + std::to_string(n)),
          index(n) {}
};

// A requested certified error budget cannot be met.
struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Series evaluation needs coefficients beyond the stored truncation order.
struct needs_more_coefficients : std::runtime_error {
    long required;
    explicit needs_more_coefficients(long need)
        : std::runtime_error("coefficient table too short, need order >= " +
                             std::to_string(need)),
          required(need) {}
};

// Evaluation requested outside a certified convergence region.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No evaluation algorithm converges for the given parameters.
struct algorithm_selection_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Eigenvalue data does not split over Q for the requested weight.
struct unsupported_weight_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A Hecke eigenvalue needed by the lift is missing.
struct eigenvalue_gap_error : std::runtime_error {
    long p;
    explicit eigenvalue_gap_error(long prime)
        : std::runtime_error("missing Hecke eigenvalue for p = " + std::to_string(prime)),
          p(prime) {}
};

// A self-check (pointwise validation, checksum, ...) failed.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace halfint
