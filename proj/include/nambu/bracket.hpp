#pragma once

#include <map>
#include <optional>
#include <string>

#include "nambu/skew_tensor.hpp"

namespace nambu {

// Order-3 fully antisymmetric tensor with constant or field-valued canonical
// components. Serves both as the generalized Poisson operator (contravariant)
// and as the symplectic 3-form (covariant).
class SkewField3 {
public:
    static SkewField3 constant(SkewTensor3 t);
    static SkewField3 field(int n, Variance variance,
                            std::map<std::array<int, 3>, ScalarField> entries);

    int dim() const { return n_; }
    Variance variance() const { return variance_; }
    bool is_constant() const { return const_.has_value(); }

    /// Constant tensor body, or nullptr for field-valued operators.
    const SkewTensor3* as_constant() const { return const_ ? &*const_ : nullptr; }

    /// Signed component as a symbolic field (constants are wrapped).
    ScalarField component_field(int i, int j, int k) const;

    /// Signed component evaluated at a point.
    double component_at(int i, int j, int k, const State& x) const;

    /// Canonical triples carrying a stored entry (all of them for constants).
    std::vector<std::array<int, 3>> support() const;

private:
    SkewField3(int n, Variance v) : n_(n), variance_(v) {}
    int n_ = 0;
    Variance variance_ = Variance::contravariant;
    std::optional<SkewTensor3> const_;
    std::map<std::array<int, 3>, ScalarField> fields_;
};

using PoissonOperator3 = SkewField3; // contravariant
using SymplecticForm3 = SkewField3;  // covariant

/// Vector field with symbolic components.
struct VectorField {
    int n = 0;
    std::vector<ScalarField> comps;

    State eval(const State& x) const {
        State out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = comps[static_cast<std::size_t>(i)].eval(x);
        return out;
    }
};

/// A generalized Hamiltonian system: dx/dt = J(dG, dH).
struct NambuSystem {
    int n = 0;
    PoissonOperator3 J = PoissonOperator3::constant(levi_civita());
    ScalarField G, H;
    std::string label;
};

/// Skew matrix of symbolic fields, used for induced 2-brackets.
struct OperatorMatrix {
    int n = 0;
    std::vector<ScalarField> entries; // row-major n*n

    const ScalarField& at(int i, int j) const {
        return entries[static_cast<std::size_t>(i * n + j)];
    }
};

/// The generalized Poisson bracket {F,G,H} = J^{ijk} F_i G_j H_k as a field.
ScalarField nambu_bracket(const PoissonOperator3& j, const ScalarField& f,
                          const ScalarField& g, const ScalarField& h);

/// X^i = J^{ijk} G_j H_k, built symbolically.
VectorField hamiltonian_vector_field(const NambuSystem& sys);

/// Induced operator of the 2-bracket {.,G,.}: P^{ac} = J^{abc} G_b.
OperatorMatrix induced_operator(const PoissonOperator3& j, const ScalarField& g);

/// sum_i dX^i/dx^i, symbolically.
ScalarField divergence(const VectorField& x);

} // namespace nambu
