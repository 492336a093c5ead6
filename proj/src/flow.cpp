#include "nambu/flow.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

namespace nambu {

namespace {

using Rhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

// Dormand-Prince 5(4) tableau
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// embedded 4th-order weights
constexpr double E1 = 5179.0 / 57600, E3 = 7571.0 / 16695, E4 = 393.0 / 640,
                 E5 = -92097.0 / 339200, E6 = 187.0 / 2100, E7 = 1.0 / 40;

class Stepper {
public:
    Stepper(Rhs rhs, std::size_t dim) : rhs_(std::move(rhs)) {
        for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y5_})
            k->assign(dim, 0.0);
    }

    // one RK4 step of size h
    void rk4(double t, std::vector<double>& y, double h) {
        const std::size_t d = y.size();
        rhs_(t, y, k1_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
        rhs_(t + 0.5 * h, tmp_, k2_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
        rhs_(t + 0.5 * h, tmp_, k3_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + h * k3_[i];
        rhs_(t + h, tmp_, k4_);
        for (std::size_t i = 0; i < d; ++i)
            y[i] += h / 6.0 * (k1_[i] + 2 * k2_[i] + 2 * k3_[i] + k4_[i]);
    }

    // one embedded Dormand-Prince attempt; returns the scaled error estimate
    double dopri5(double t, const std::vector<double>& y, double h, double rel, double abs) {
        const std::size_t d = y.size();
        rhs_(t, y, k1_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + h * A21 * k1_[i];
        rhs_(t + C2 * h, tmp_, k2_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + h * (A31 * k1_[i] + A32 * k2_[i]);
        rhs_(t + C3 * h, tmp_, k3_);
        for (std::size_t i = 0; i < d; ++i)
            tmp_[i] = y[i] + h * (A41 * k1_[i] + A42 * k2_[i] + A43 * k3_[i]);
        rhs_(t + C4 * h, tmp_, k4_);
        for (std::size_t i = 0; i < d; ++i)
            tmp_[i] = y[i] + h * (A51 * k1_[i] + A52 * k2_[i] + A53 * k3_[i] + A54 * k4_[i]);
        rhs_(t + C5 * h, tmp_, k5_);
        for (std::size_t i = 0; i < d; ++i)
            tmp_[i] = y[i] +
                      h * (A61 * k1_[i] + A62 * k2_[i] + A63 * k3_[i] + A64 * k4_[i] + A65 * k5_[i]);
        rhs_(t + h, tmp_, k6_);
        for (std::size_t i = 0; i < d; ++i)
            y5_[i] = y[i] + h * (B1 * k1_[i] + B3 * k3_[i] + B4 * k4_[i] + B5 * k5_[i] + B6 * k6_[i]);
        rhs_(t + h, y5_, k7_);

        double err = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double y4 = y[i] + h * (E1 * k1_[i] + E3 * k3_[i] + E4 * k4_[i] + E5 * k5_[i] +
                                    E6 * k6_[i] + E7 * k7_[i]);
            double sc = abs + rel * std::max(std::abs(y[i]), std::abs(y5_[i]));
            double e = (y5_[i] - y4) / sc;
            err += e * e;
        }
        return std::sqrt(err / static_cast<double>(d));
    }

    const std::vector<double>& fifth_order() const { return y5_; }

private:
    Rhs rhs_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y5_;
};

// drives the stepper from t0 to t1, invoking `emit` at every output time
void drive(const Rhs& rhs, std::vector<double>& y, const IntegratorConfig& cfg,
           const std::function<void(double, const std::vector<double>&)>& emit) {
    Stepper st(rhs, y.size());
    const double dir = cfg.t1 >= cfg.t0 ? 1.0 : -1.0;
    const double t_end = cfg.t1;
    double t = cfg.t0;
    long steps = 0;
    double last_emit = t;
    emit(t, y);
    double next_out = cfg.t0 + dir * cfg.output_dt;

    auto maybe_emit = [&](double tt) {
        if (dir * (tt - next_out) >= -1e-12) {
            emit(tt, y);
            last_emit = tt;
            next_out += dir * cfg.output_dt;
        }
    };

    if (cfg.method == IntegratorConfig::Method::rk4) {
        if (cfg.step <= 0) throw IntegrateError("rk4 needs a positive step", t, y);
        while (dir * (t_end - t) > 1e-14) {
            double h = dir * std::min(cfg.step, std::abs(t_end - t));
            // land exactly on output samples
            if (dir * (t + h - next_out) > 0 && dir * (next_out - t) > 0) h = next_out - t;
            st.rk4(t, y, h);
            t += h;
            if (++steps > cfg.max_steps) throw IntegrateError("max_steps exceeded", t, y);
            maybe_emit(t);
        }
    } else {
        double hmag = std::min(cfg.output_dt, std::abs(t_end - cfg.t0));
        while (dir * (t_end - t) > 1e-14) {
            if (hmag < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrateError("step size underflow", t, y);
            double gap_out = dir * (next_out - t);
            if (gap_out <= 1e-12) { // output boundary already passed within tolerance
                next_out += dir * cfg.output_dt;
                continue;
            }
            double try_mag = std::min({hmag, gap_out, dir * (t_end - t)});
            bool clipped = try_mag < hmag;

            double err = st.dopri5(t, y, dir * try_mag, cfg.rel_tol, cfg.abs_tol);
            if (err <= 1.0) {
                t += dir * try_mag;
                y = st.fifth_order();
                maybe_emit(t);
                double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
                // a step truncated by an output boundary must not shrink the
                // controller's natural step, or it can never regrow
                hmag = clipped ? std::max(hmag, try_mag * grow) : try_mag * grow;
            } else {
                hmag = try_mag * std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
            if (++steps > cfg.max_steps) throw IntegrateError("max_steps exceeded", t, y);
        }
    }
    if (std::abs(last_emit - t) > 1e-12) emit(t, y);
}

} // namespace

Trajectory integrate(const NambuSystem& sys, const State& x0, const IntegratorConfig& cfg,
                     std::span<const Covector> conserved_directions) {
    const int n = sys.n;
    if (static_cast<int>(x0.size()) != n)
        throw IntegrateError("initial state dimension mismatch", cfg.t0, x0);

    VectorField xf = hamiltonian_vector_field(sys);
    ScalarField div = divergence(xf);

    Rhs rhs = [&xf, n](double, const std::vector<double>& y, std::vector<double>& dy) {
        for (int i = 0; i < n; ++i) dy[static_cast<std::size_t>(i)] = xf.comps[static_cast<std::size_t>(i)].eval(y);
    };

    Trajectory traj;
    auto emit = [&](double t, const std::vector<double>& y) {
        TrajectoryDiag d;
        d.g = sys.G.eval(y);
        d.h = sys.H.eval(y);
        d.div = div.eval(y);
        for (const auto& c : conserved_directions) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += c[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
            d.casimirs.push_back(dot);
        }
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.diagnostics.push_back(std::move(d));
    };

    std::vector<double> y = x0;
    try {
        drive(rhs, y, cfg, emit);
    } catch (const EvalError& e) {
        throw IntegrateError(std::string("evaluation failed: ") + e.what(),
                             traj.times.empty() ? cfg.t0 : traj.times.back(), y);
    }
    return traj;
}

std::vector<DriftStat> conservation_report(const Trajectory& traj,
                                           std::span<const ScalarField> fields) {
    std::vector<DriftStat> out;
    for (const auto& f : fields) {
        DriftStat st;
        if (!traj.states.empty()) {
            st.initial = f.eval(traj.states.front());
            for (const auto& x : traj.states)
                st.max_abs_drift = std::max(st.max_abs_drift, std::abs(f.eval(x) - st.initial));
            st.rel_drift = st.max_abs_drift / std::max(1.0, std::abs(st.initial));
        }
        out.push_back(st);
    }
    return out;
}

double monodromy_determinant(const NambuSystem& sys, const State& x0, double t,
                             const IntegratorConfig& cfg) {
    const int n = sys.n;
    if (!sys.J.is_constant())
        throw TensorError("monodromy_determinant requires a constant operator");
    if (static_cast<int>(x0.size()) != n)
        throw IntegrateError("initial state dimension mismatch", cfg.t0, x0);

    VectorField xf = hamiltonian_vector_field(sys);
    // symbolic Jacobian dX^i/dx^j
    std::vector<ScalarField> jac(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int q = 0; q < n; ++q)
            jac[static_cast<std::size_t>(i * n + q)] = xf.comps[static_cast<std::size_t>(i)].diff(q);

    // augmented system: state followed by the row-major variational matrix
    std::vector<double> y(static_cast<std::size_t>(n + n * n), 0.0);
    for (int i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] = x0[static_cast<std::size_t>(i)];
        y[static_cast<std::size_t>(n + i * n + i)] = 1.0;
    }

    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> jv(static_cast<std::size_t>(n * n));
    Rhs rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dy) {
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = yy[static_cast<std::size_t>(i)];
        for (int i = 0; i < n; ++i) dy[static_cast<std::size_t>(i)] = xf.comps[static_cast<std::size_t>(i)].eval(x);
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < n; ++q) jv[static_cast<std::size_t>(i * n + q)] = jac[static_cast<std::size_t>(i * n + q)].eval(x);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c) {
                double sum = 0.0;
                for (int q = 0; q < n; ++q)
                    sum += jv[static_cast<std::size_t>(i * n + q)] * yy[static_cast<std::size_t>(n + q * n + c)];
                dy[static_cast<std::size_t>(n + i * n + c)] = sum;
            }
    };

    IntegratorConfig run = cfg;
    run.t0 = 0.0;
    run.t1 = t;
    run.output_dt = std::abs(t) > 0 ? std::abs(t) : 1.0; // endpoints only
    drive(rhs, y, run, [](double, const std::vector<double>&) {});

    Eigen::MatrixXd phi(n, n);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < n; ++c) phi(i, c) = y[static_cast<std::size_t>(n + i * n + c)];
    return phi.determinant();
}

LieInvarianceReport lie_invariance_residual(const NambuSystem& sys, const SymplecticForm3& w,
                                            std::span<const State> points) {
    const int n = sys.n;
    if (w.dim() != n) throw TensorError("lie_invariance_residual: dimension mismatch");

    VectorField xf = hamiltonian_vector_field(sys);

    // sigma = i_X w, a 2-form with components sum_i X^i w_{ijk}
    TwoForm sigma;
    sigma.n = n;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            ScalarField s = ScalarField::constant(0.0, n);
            for (int i = 0; i < n; ++i) {
                if (i == j || i == k) continue;
                s = s + xf.comps[static_cast<std::size_t>(i)] * w.component_field(i, j, k);
            }
            double v;
            if (s.is_constant(&v) && v == 0.0) continue;
            sigma.comps.emplace(std::array<int, 2>{j, k}, std::move(s));
        }

    std::vector<ScalarField> dg(static_cast<std::size_t>(n)), dh(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        dg[static_cast<std::size_t>(i)] = sys.G.diff(i);
        dh[static_cast<std::size_t>(i)] = sys.H.diff(i);
    }

    LieInvarianceReport rep;

    // pairing: (i_X w)_{jk} must equal H_k G_j - H_j G_k
    std::vector<std::pair<std::array<int, 2>, ScalarField>> pair_fields;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            ScalarField gap = sigma.component_field(j, k) -
                              (dh[static_cast<std::size_t>(k)] * dg[static_cast<std::size_t>(j)] -
                               dh[static_cast<std::size_t>(j)] * dg[static_cast<std::size_t>(k)]);
            double v;
            if (gap.is_constant(&v) && v == 0.0) continue;
            pair_fields.push_back({{j, k}, std::move(gap)});
        }

    // exterior derivative of i_X w
    SymplecticForm3 dsigma = exterior_derivative(sigma);
    std::vector<std::pair<std::array<int, 3>, ScalarField>> d_fields;
    for (const auto& tr : dsigma.support())
        d_fields.push_back({tr, dsigma.component_field(tr[0], tr[1], tr[2])});

    for (const auto& x : points) {
        for (const auto& [jk, f] : pair_fields) rep.pairing.consider(f.eval(x), x, {jk[0], jk[1]});
        for (const auto& [tr, f] : d_fields)
            rep.d_ixw.consider(f.eval(x), x, {tr[0], tr[1], tr[2]});
        ++rep.pairing.samples;
        ++rep.d_ixw.samples;
        if (pair_fields.empty()) rep.pairing.consider(0.0, x, {});
        if (d_fields.empty()) rep.d_ixw.consider(0.0, x, {});
    }
    return rep;
}

void write_trajectory_json(std::ostream& os, const Trajectory& traj) {
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    auto put_array = [&](const char* key, auto&& value_at, std::size_t count) {
        os << "  \"" << key << "\": [";
        for (std::size_t r = 0; r < count; ++r) {
            if (r) os << ", ";
            put(value_at(r));
        }
        os << "]";
    };
    const std::size_t rows = traj.times.size();
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    os << "{\n";
    put_array("t", [&](std::size_t r) { return traj.times[r]; }, rows);
    os << ",\n";
    for (std::size_t i = 0; i < n; ++i) {
        std::string key = "x" + std::to_string(i + 1);
        put_array(key.c_str(), [&](std::size_t r) { return traj.states[r][i]; }, rows);
        os << ",\n";
    }
    put_array("G", [&](std::size_t r) { return traj.diagnostics[r].g; }, rows);
    os << ",\n";
    put_array("H", [&](std::size_t r) { return traj.diagnostics[r].h; }, rows);
    os << ",\n";
    put_array("div", [&](std::size_t r) { return traj.diagnostics[r].div; }, rows);
    os << "\n}\n";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.states.empty()) return;
    const std::size_t n = traj.states.front().size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
    os << ",G,H,div\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        put(traj.times[r]);
        for (std::size_t i = 0; i < n; ++i) {
            os << ',';
            put(traj.states[r][i]);
        }
        os << ',';
        put(traj.diagnostics[r].g);
        os << ',';
        put(traj.diagnostics[r].h);
        os << ',';
        put(traj.diagnostics[r].div);
        os << '\n';
    }
}

} // namespace nambu
