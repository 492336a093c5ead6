#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nambu/rng.hpp"

namespace nambu {

/// Syntax error from parse(); `offset` is the byte position in the input.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t offset_)
        : std::runtime_error(msg), offset(offset_) {}
    std::size_t offset;
};

/// Evaluation domain error (log of non-positive, division by zero, ...).
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
struct Node;
using NodePtr = std::shared_ptr<const Node>;
} // namespace detail

// Immutable scalar field over coordinates x1..xn with exact symbolic
// differentiation. Arithmetic operators compose ASTs; nothing is evaluated
// until eval() is called.
class ScalarField {
public:
    ScalarField() : ScalarField(constant(0.0, 0)) {}

    static ScalarField constant(double value, int dim);
    static ScalarField coordinate(int index, int dim); // index 0-based

    int dim() const { return dim_; }

    double eval(const State& x) const;

    /// Exact partial derivative with respect to coordinate i (0-based).
    ScalarField diff(int i) const;

    /// Parseable text form; parse(str()) evaluates identically.
    std::string str() const;

    /// True if the field folded to a literal constant.
    bool is_constant(double* value = nullptr) const;

    friend ScalarField operator+(const ScalarField&, const ScalarField&);
    friend ScalarField operator-(const ScalarField&, const ScalarField&);
    friend ScalarField operator*(const ScalarField&, const ScalarField&);
    friend ScalarField operator/(const ScalarField&, const ScalarField&);
    friend ScalarField operator-(const ScalarField&);
    friend ScalarField operator*(double, const ScalarField&);

    static ScalarField pow(const ScalarField& base, const ScalarField& exponent);
    static ScalarField sin(const ScalarField&);
    static ScalarField cos(const ScalarField&);
    static ScalarField exp(const ScalarField&);
    static ScalarField log(const ScalarField&);
    static ScalarField sqrt(const ScalarField&);

private:
    ScalarField(detail::NodePtr root, int dim) : root_(std::move(root)), dim_(dim) {}

    detail::NodePtr root_;
    int dim_ = 0;

    friend ScalarField parse_field(std::string_view, int);
};

/// Parse an expression over x1..xn (1-based variables in the text).
ScalarField parse_field(std::string_view text, int dim);

/// Gradient by exact differentiation, evaluated at x.
std::vector<double> gradient(const ScalarField& f, const State& x);

/// Random polynomial of total degree <= degree with coefficients in [-1,1].
/// Used by randomized identity checks; deterministic for a given rng state.
ScalarField random_polynomial(int dim, int degree, Rng& rng);

} // namespace nambu
