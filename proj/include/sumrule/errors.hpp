#pragma once

#include <stdexcept>
#include <string>

namespace sumrule {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameter for a reference family, mapping or rule.
class parameter_error : public error {
public:
    using error::error;
};

// Operands live on different spaces (real line vs unit circle).
class space_mismatch_error : public error {
public:
    using error::error;
};

// A measure failed a structural check (normalization, atom masses, ...).
class validation_error : public error {
public:
    using error::error;
};

// Coefficient inversion left the admissible range (|u|>1, z<0, |alpha|>=1).
class support_violation_error : public error {
public:
    using error::error;
};

// Levinson recursion lost positive definiteness before the requested order.
class moment_degeneracy_error : public error {
public:
    using error::error;
};

// The measure has too few support points for the requested order.
class trivial_measure_error : public error {
public:
    trivial_measure_error(const std::string& what, int largest_valid)
        : error(what), largest_valid_order(largest_valid) {}
    int largest_valid_order;
};

// Division blow-up in the deformed-coefficient recursion.
class degenerate_normalization_error : public error {
public:
    using error::error;
};

// Quadrature or eigensolver failure with a diagnostic.
class numeric_error : public error {
public:
    using error::error;
};

// Evaluation requested outside a function's domain (e.g. |z|>=1).
class domain_error : public error {
public:
    using error::error;
};

// A mapping precondition failed (asymmetric input, support overflow).
class symmetry_error : public error {
public:
    using error::error;
};

}  // namespace sumrule
