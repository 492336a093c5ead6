#pragma once

#include <span>

#include "nambu/identities.hpp"

namespace nambu {

struct IntegratorConfig {
    enum class Method { rk4, rk45 };
    Method method = Method::rk45;
    double step = 1e-2;     // rk4 fixed step
    double rel_tol = 1e-10; // rk45
    double abs_tol = 1e-12; // rk45
    double t0 = 0.0;
    double t1 = 10.0;
    double output_dt = 1e-2;
    long max_steps = 2'000'000;
};

struct IntegrateError : std::runtime_error {
    IntegrateError(const std::string& msg, double t_, State x_)
        : std::runtime_error(msg + " at t = " + std::to_string(t_)), t(t_), x(std::move(x_)) {}
    double t;
    State x;
};

/// Per-sample conservation/volume diagnostics.
struct TrajectoryDiag {
    double g = 0, h = 0, div = 0;
    std::vector<double> casimirs; // c . x for each supplied kernel direction
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<TrajectoryDiag> diagnostics;
};

/// Integrate dx/dt = J(dG,dH) and record diagnostics at the output times.
/// `conserved_directions` are constant covectors tracked as c.x per sample.
Trajectory integrate(const NambuSystem& sys, const State& x0, const IntegratorConfig& cfg,
                     std::span<const Covector> conserved_directions = {});

// Drift of a scalar field along a trajectory. rel_drift uses the mixed
// scale max(1, |F(x0)|) so it degrades to the absolute drift when the
// initial value sits near zero instead of blowing up.
struct DriftStat {
    double max_abs_drift = 0; // max_t |F(x(t)) - F(x(0))|
    double rel_drift = 0;
    double initial = 0;
};

std::vector<DriftStat> conservation_report(const Trajectory& traj,
                                           std::span<const ScalarField> fields);

/// det of the variational (monodromy) matrix at time t: dPhi/dt = (dX/dx) Phi.
/// Requires a constant operator so the flow is divergence-free.
double monodromy_determinant(const NambuSystem& sys, const State& x0, double t,
                             const IntegratorConfig& cfg);

// Lie-invariance certificates for the symplectic 3-form along the flow:
//   pairing   max |(i_X w)_{jk} + dH_j dG_k - dH_k dG_j|   (i_X w = -dH^dG)
//   d_ixw     max |d(i_X w)_{ijk}|                          (L_X w = d i_X w)
struct LieInvarianceReport {
    ResidualReport pairing;
    ResidualReport d_ixw;

    double worst() const { return std::max(pairing.max_abs, d_ixw.max_abs); }
};

LieInvarianceReport lie_invariance_residual(const NambuSystem& sys, const SymplecticForm3& w,
                                            std::span<const State> points);

/// Trajectory export, "t,x1,...,xn,G,H,div" per line.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// JSON variant of the same export (arrays per column).
void write_trajectory_json(std::ostream& os, const Trajectory& traj);

} // namespace nambu
