#include "nambu/bracket.hpp"

namespace nambu {

SkewField3 SkewField3::constant(SkewTensor3 t) {
    SkewField3 s(t.dim(), t.variance());
    s.const_ = std::move(t);
    return s;
}

SkewField3 SkewField3::field(int n, Variance variance,
                             std::map<std::array<int, 3>, ScalarField> entries) {
    SkewField3 s(n, variance);
    for (const auto& [tr, fld] : entries) {
        if (!(tr[0] < tr[1] && tr[1] < tr[2]) || tr[0] < 0 || tr[2] >= n)
            throw TensorError("field tensor entries must use canonical triples i<j<k");
        (void)fld;
    }
    s.fields_ = std::move(entries);
    return s;
}

namespace {
// permutation sign for a triple, 0 on repeats
int tri_sign(int& i, int& j, int& k) {
    int sign = 1;
    if (i > j) { std::swap(i, j); sign = -sign; }
    if (j > k) { std::swap(j, k); sign = -sign; }
    if (i > j) { std::swap(i, j); sign = -sign; }
    if (i == j || j == k) return 0;
    return sign;
}
} // namespace

ScalarField SkewField3::component_field(int i, int j, int k) const {
    if (const_) return ScalarField::constant(const_->component(i, j, k), n_);
    int sign = tri_sign(i, j, k);
    if (sign == 0) return ScalarField::constant(0.0, n_);
    auto it = fields_.find({i, j, k});
    if (it == fields_.end()) return ScalarField::constant(0.0, n_);
    return sign == 1 ? it->second : -it->second;
}

double SkewField3::component_at(int i, int j, int k, const State& x) const {
    if (const_) return const_->component(i, j, k);
    int sign = tri_sign(i, j, k);
    if (sign == 0) return 0.0;
    auto it = fields_.find({i, j, k});
    if (it == fields_.end()) return 0.0;
    return sign * it->second.eval(x);
}

std::vector<std::array<int, 3>> SkewField3::support() const {
    std::vector<std::array<int, 3>> out;
    if (const_) {
        for (const auto& tr : const_->triples())
            if (const_->canonical(tr[0], tr[1], tr[2]) != 0.0) out.push_back(tr);
        return out;
    }
    for (const auto& [tr, fld] : fields_) {
        double v;
        if (fld.is_constant(&v) && v == 0.0) continue;
        out.push_back(tr);
    }
    return out;
}

ScalarField nambu_bracket(const PoissonOperator3& j, const ScalarField& f,
                          const ScalarField& g, const ScalarField& h) {
    const int n = j.dim();
    if ((f.dim() && f.dim() != n) || (g.dim() && g.dim() != n) || (h.dim() && h.dim() != n))
        throw TensorError("nambu_bracket: dimension mismatch");

    std::vector<ScalarField> df(static_cast<std::size_t>(n)), dg(df), dh(df);
    std::vector<bool> have(static_cast<std::size_t>(n), false);
    auto want = [&](int i) {
        if (!have[static_cast<std::size_t>(i)]) {
            df[static_cast<std::size_t>(i)] = f.diff(i);
            dg[static_cast<std::size_t>(i)] = g.diff(i);
            dh[static_cast<std::size_t>(i)] = h.diff(i);
            have[static_cast<std::size_t>(i)] = true;
        }
    };

    ScalarField total = ScalarField::constant(0.0, n);
    for (const auto& tr : j.support()) {
        int a = tr[0], b = tr[1], c = tr[2];
        want(a); want(b); want(c);
        auto F = [&](int i) -> const ScalarField& { return df[static_cast<std::size_t>(i)]; };
        auto G = [&](int i) -> const ScalarField& { return dg[static_cast<std::size_t>(i)]; };
        auto H = [&](int i) -> const ScalarField& { return dh[static_cast<std::size_t>(i)]; };
        // J^{abc} times the 3x3 determinant of first derivatives over (a,b,c)
        ScalarField det = F(a) * (G(b) * H(c) - G(c) * H(b)) -
                          F(b) * (G(a) * H(c) - G(c) * H(a)) +
                          F(c) * (G(a) * H(b) - G(b) * H(a));
        total = total + j.component_field(a, b, c) * det;
    }
    return total;
}

VectorField hamiltonian_vector_field(const NambuSystem& sys) {
    const int n = sys.n;
    std::vector<ScalarField> dg(static_cast<std::size_t>(n)), dh(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        dg[static_cast<std::size_t>(i)] = sys.G.diff(i);
        dh[static_cast<std::size_t>(i)] = sys.H.diff(i);
    }
    VectorField x;
    x.n = n;
    x.comps.assign(static_cast<std::size_t>(n), ScalarField::constant(0.0, n));
    auto wedge = [&](int b, int c) {
        return dg[static_cast<std::size_t>(b)] * dh[static_cast<std::size_t>(c)] -
               dg[static_cast<std::size_t>(c)] * dh[static_cast<std::size_t>(b)];
    };
    for (const auto& tr : sys.J.support()) {
        int a = tr[0], b = tr[1], c = tr[2];
        ScalarField v = sys.J.component_field(a, b, c);
        auto& xa = x.comps[static_cast<std::size_t>(a)];
        auto& xb = x.comps[static_cast<std::size_t>(b)];
        auto& xc = x.comps[static_cast<std::size_t>(c)];
        xa = xa + v * wedge(b, c);
        xb = xb + v * wedge(c, a);
        xc = xc + v * wedge(a, b);
    }
    return x;
}

OperatorMatrix induced_operator(const PoissonOperator3& j, const ScalarField& g) {
    const int n = j.dim();
    if (g.dim() && g.dim() != n) throw TensorError("induced_operator: dimension mismatch");
    std::vector<ScalarField> dg(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dg[static_cast<std::size_t>(i)] = g.diff(i);

    OperatorMatrix p;
    p.n = n;
    p.entries.assign(static_cast<std::size_t>(n * n), ScalarField::constant(0.0, n));
    auto at = [&](int a, int c) -> ScalarField& {
        return p.entries[static_cast<std::size_t>(a * n + c)];
    };
    for (const auto& tr : j.support()) {
        // P^{ac} = J^{abc} G_b: each support triple feeds six (a,c) slots
        int i0 = tr[0], i1 = tr[1], i2 = tr[2];
        ScalarField v = j.component_field(i0, i1, i2);
        auto feed = [&](int a, int b, int c, int sign) {
            ScalarField term = (sign == 1 ? v : -v) * dg[static_cast<std::size_t>(b)];
            at(a, c) = at(a, c) + term;
        };
        feed(i0, i1, i2, +1);
        feed(i1, i0, i2, -1);
        feed(i1, i2, i0, +1);
        feed(i2, i1, i0, -1);
        feed(i2, i0, i1, +1);
        feed(i0, i2, i1, -1);
    }
    return p;
}

ScalarField divergence(const VectorField& x) {
    ScalarField d = ScalarField::constant(0.0, x.n);
    for (int i = 0; i < x.n; ++i) d = d + x.comps[static_cast<std::size_t>(i)].diff(i);
    return d;
}

} // namespace nambu
