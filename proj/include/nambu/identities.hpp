#pragma once

#include <array>
#include <span>

#include "nambu/bracket.hpp"

namespace nambu {

// Checkers return the worst violation plus where it happened, never a bare
// boolean: the magnitudes and witnesses are the point.
struct ResidualReport {
    double max_abs = 0.0;
    State argmax_point;
    std::vector<int> argmax_indices; // 0-based
    int samples = 0;

    void consider(double v, const State& x, std::vector<int> idx) {
        double a = std::abs(v);
        if (samples == 0 || a > max_abs) {
            max_abs = a;
            argmax_point = x;
            argmax_indices = std::move(idx);
        }
    }
};

/// 2-form with symbolic components sigma_{jk} (j<k stored).
struct TwoForm {
    int n = 0;
    std::map<std::array<int, 2>, ScalarField> comps;

    ScalarField component_field(int j, int k) const;
};

/// Exterior derivative of a 2-form, as a (generally field-valued) 3-form.
SymplecticForm3 exterior_derivative(const TwoForm& sigma);

/// dw = 0 residual: the four-term cyclic sum over i<j<k<l, exact derivatives.
ResidualReport closure_residual(const SymplecticForm3& w, std::span<const State> points);

struct PairingError : TensorError {
    explicit PairingError(const std::string& msg) : TensorError(msg) {}
};

struct NcjOptions {
    bool check_pairing = true;  // verify sum_{j<k} w_ijk J^{jkl} = delta at each point
    double pairing_tol = 1e-8;
};

// Necessary condition for closure expressed through the inverse operator:
// the six-term bracket sum (with its overall factor 4), maximized over
// sample points and (alpha, beta).
ResidualReport jacobi_necessary_residual(const PoissonOperator3& j, const SymplecticForm3& w,
                                         std::span<const State> points,
                                         const NcjOptions& opts = {});

/// Classical Jacobi identity residual for a field-valued skew operator:
/// P^{im} dP^{jk}/dx^m + cyclic, maximized over points and i<j<k.
ResidualReport classical_jacobi_residual(const OperatorMatrix& p, std::span<const State> points);

/// |{{F1,F2,F3},F4,F5} - {{F1,F4,F5},F2,F3} - {F1,{F2,F4,F5},F3} - {F1,F2,{F3,F4,F5}}|.
ResidualReport fundamental_identity_residual(const PoissonOperator3& j,
                                             const std::array<ScalarField, 5>& f,
                                             std::span<const State> points);

struct AxiomReport {
    ResidualReport trilinearity;
    ResidualReport skew_symmetry;
    ResidualReport leibniz;

    double worst() const {
        return std::max({trilinearity.max_abs, skew_symmetry.max_abs, leibniz.max_abs});
    }
};

/// Trilinearity, skew-symmetry and Leibniz residuals over randomized
/// polynomial arguments (deterministic for a given seed).
AxiomReport axiom_residuals(const PoissonOperator3& j, std::span<const State> points,
                            std::uint64_t seed = 0, int rounds = 4);

} // namespace nambu
