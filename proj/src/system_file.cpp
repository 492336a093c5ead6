#include "nambu/system_file.hpp"

#include <fstream>

#include "nambu/canonical.hpp"

namespace nambu {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw SystemFileError(where, msg);
}

double require_number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

std::string require_string(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

int entry_index(const Json& e, const char* key, int n, const std::string& where) {
    if (!e.contains(key)) fail(where, std::string("missing index '") + key + "'");
    double raw = require_number(e.at(key), where);
    int idx = static_cast<int>(raw);
    if (idx != raw || idx < 1 || idx > n)
        fail(where, std::string("index '") + key + "' must be an integer in [1," +
                        std::to_string(n) + "]");
    return idx - 1;
}

SkewField3 parse_tensor(const Json& jt, int n) {
    const std::string where = "tensor";
    if (!jt.is_object()) fail(where, "expected an object");

    Variance var;
    std::string vs = require_string(jt.value("variance", Json("contravariant")), where + ".variance");
    if (vs == "covariant") var = Variance::covariant;
    else if (vs == "contravariant") var = Variance::contravariant;
    else fail(where + ".variance", "must be 'covariant' or 'contravariant'");

    std::string kind = require_string(jt.value("kind", Json("constant")), where + ".kind");
    if (!jt.contains("entries") || !jt.at("entries").is_array())
        fail(where + ".entries", "expected an array of {i,j,k,value|expr} records");

    if (kind == "constant") {
        std::vector<TripleEntry> entries;
        int pos = 0;
        for (const auto& e : jt.at("entries")) {
            std::string ew = where + ".entries[" + std::to_string(pos++) + "]";
            TripleEntry te;
            te.i = entry_index(e, "i", n, ew);
            te.j = entry_index(e, "j", n, ew);
            te.k = entry_index(e, "k", n, ew);
            if (!e.contains("value")) fail(ew, "constant tensors need numeric 'value' entries");
            te.value = require_number(e.at("value"), ew + ".value");
            entries.push_back(te);
        }
        try {
            SkewTensor3 t = make_skew3(n, var, entries);
            // optional linear change of basis applied to the literal
            if (jt.contains("basis_change")) {
                const auto& bc = jt.at("basis_change");
                if (!bc.is_array() || static_cast<int>(bc.size()) != n)
                    fail(where + ".basis_change", "expected an n x n row-major matrix");
                Eigen::MatrixXd m(n, n);
                for (int r = 0; r < n; ++r) {
                    if (!bc[static_cast<std::size_t>(r)].is_array() ||
                        static_cast<int>(bc[static_cast<std::size_t>(r)].size()) != n)
                        fail(where + ".basis_change", "expected an n x n row-major matrix");
                    for (int c = 0; c < n; ++c)
                        m(r, c) = require_number(bc[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                                                 where + ".basis_change");
                }
                t = transform(t, BasisChange{m});
            }
            return SkewField3::constant(std::move(t));
        } catch (const TensorError& te) {
            fail(where + ".entries", te.what());
        }
    }
    if (kind != "field") fail(where + ".kind", "must be 'constant' or 'field'");
    if (jt.contains("basis_change"))
        fail(where + ".basis_change", "basis changes apply to constant tensors only");

    std::map<std::array<int, 3>, ScalarField> fields;
    int pos = 0;
    for (const auto& e : jt.at("entries")) {
        std::string ew = where + ".entries[" + std::to_string(pos++) + "]";
        int i = entry_index(e, "i", n, ew);
        int j = entry_index(e, "j", n, ew);
        int k = entry_index(e, "k", n, ew);
        // canonicalize index order with the sign rule
        int sign = 1;
        if (i > j) { std::swap(i, j); sign = -sign; }
        if (j > k) { std::swap(j, k); sign = -sign; }
        if (i > j) { std::swap(i, j); sign = -sign; }
        if (i == j || j == k) fail(ew, "repeated index in triple");
        ScalarField f;
        if (e.contains("expr")) {
            std::string text = require_string(e.at("expr"), ew + ".expr");
            try {
                f = parse_field(text, n);
            } catch (const ParseError& pe) {
                fail(ew + ".expr", std::string(pe.what()) + " (offset " +
                                       std::to_string(pe.offset) + ")");
            }
        } else if (e.contains("value")) {
            f = ScalarField::constant(require_number(e.at("value"), ew + ".value"), n);
        } else {
            fail(ew, "field tensors need 'expr' or 'value' entries");
        }
        if (sign == -1) f = -f;
        if (fields.count({i, j, k})) fail(ew, "duplicate entry for canonical triple");
        fields.emplace(std::array<int, 3>{i, j, k}, std::move(f));
    }
    return SkewField3::field(n, var, std::move(fields));
}

} // namespace

SystemFile parse_system_json(const Json& j) {
    SystemFile sf;
    if (!j.is_object()) fail("$", "system file must be a JSON object");
    if (!j.contains("dimension")) fail("dimension", "missing");
    double nd = require_number(j.at("dimension"), "dimension");
    sf.n = static_cast<int>(nd);
    if (sf.n != nd || sf.n < 3) fail("dimension", "must be an integer >= 3");

    sf.label = j.value("label", std::string{});

    if (!j.contains("tensor")) fail("tensor", "missing");
    sf.tensor = parse_tensor(j.at("tensor"), sf.n);

    if (!j.contains("hamiltonians") || !j.at("hamiltonians").is_object())
        fail("hamiltonians", "missing object with G and H");
    const auto& ham = j.at("hamiltonians");
    for (const char* key : {"G", "H"}) {
        if (!ham.contains(key)) fail(std::string("hamiltonians.") + key, "missing");
        std::string text = require_string(ham.at(key), std::string("hamiltonians.") + key);
        try {
            ScalarField f = parse_field(text, sf.n);
            if (key[0] == 'G') { sf.g_text = text; sf.g = f; }
            else { sf.h_text = text; sf.h = f; }
        } catch (const ParseError& pe) {
            fail(std::string("hamiltonians.") + key,
                 std::string(pe.what()) + " (offset " + std::to_string(pe.offset) + ")");
        }
    }

    sf.sample_box = Box::unit(sf.n);
    if (j.contains("sample_box")) {
        const auto& sb = j.at("sample_box");
        if (!sb.is_array() || sb.empty()) fail("sample_box", "expected [lo,hi] or per-axis list");
        if (sb.size() == 2 && sb[0].is_number()) {
            double lo = sb[0].get<double>(), hi = sb[1].get<double>();
            if (!(lo < hi)) fail("sample_box", "lo must be < hi");
            sf.sample_box = Box::uniform(sf.n, lo, hi);
        } else {
            if (static_cast<int>(sb.size()) != sf.n)
                fail("sample_box", "per-axis list must have n entries");
            sf.sample_box.axes.clear();
            for (const auto& ax : sb) {
                if (!ax.is_array() || ax.size() != 2 || !ax[0].is_number())
                    fail("sample_box", "each axis needs [lo,hi]");
                double lo = ax[0].get<double>(), hi = ax[1].get<double>();
                if (!(lo < hi)) fail("sample_box", "lo must be < hi");
                sf.sample_box.axes.push_back({lo, hi});
            }
        }
    }

    sf.seed = static_cast<std::uint64_t>(j.value("seed", 0.0));

    if (j.contains("integrator")) {
        const auto& ji = j.at("integrator");
        if (!ji.is_object()) fail("integrator", "expected an object");
        std::string method = ji.value("method", std::string("rk45"));
        if (method == "rk4") sf.integrator.method = IntegratorConfig::Method::rk4;
        else if (method == "rk45") sf.integrator.method = IntegratorConfig::Method::rk45;
        else fail("integrator.method", "must be 'rk4' or 'rk45'");
        sf.integrator.step = ji.value("step", sf.integrator.step);
        sf.integrator.rel_tol = ji.value("rel_tol", sf.integrator.rel_tol);
        sf.integrator.abs_tol = ji.value("abs_tol", sf.integrator.abs_tol);
        sf.integrator.output_dt = ji.value("output_every", sf.integrator.output_dt);
        sf.integrator.max_steps = static_cast<long>(ji.value("max_steps", 2.0e6));
        if (ji.contains("t_span")) {
            const auto& ts = ji.at("t_span");
            if (!ts.is_array() || ts.size() != 2) fail("integrator.t_span", "expected [t0,t1]");
            sf.integrator.t0 = require_number(ts[0], "integrator.t_span[0]");
            sf.integrator.t1 = require_number(ts[1], "integrator.t_span[1]");
        }
        if (sf.integrator.step <= 0 || sf.integrator.rel_tol <= 0 || sf.integrator.abs_tol <= 0 ||
            sf.integrator.output_dt <= 0 || sf.integrator.max_steps <= 0)
            fail("integrator", "steps and tolerances must be positive");
    }

    if (j.contains("initial_state")) {
        const auto& is = j.at("initial_state");
        if (!is.is_array() || static_cast<int>(is.size()) != sf.n)
            fail("initial_state", "expected n numbers");
        State x0;
        for (const auto& v : is) x0.push_back(require_number(v, "initial_state"));
        sf.initial_state = std::move(x0);
    }
    return sf;
}

SystemFile load_system_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path.string(), "cannot open file");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& pe) {
        fail(path.string(), std::string("JSON parse error: ") + pe.what());
    }
    return parse_system_json(j);
}

PoissonOperator3 operator_from(const SystemFile& sf, double tol) {
    if (sf.tensor.variance() == Variance::contravariant) return sf.tensor;
    const SkewTensor3* c = sf.tensor.as_constant();
    if (!c)
        throw SystemFileError("tensor", "field-valued covariant tensor cannot be inverted "
                                        "into a Poisson operator");
    return PoissonOperator3::constant(right_inverse(*c, tol));
}

SymplecticForm3 form_from(const SystemFile& sf, double tol) {
    if (sf.tensor.variance() == Variance::covariant) return sf.tensor;
    const SkewTensor3* c = sf.tensor.as_constant();
    if (!c)
        throw SystemFileError("tensor", "field-valued contravariant tensor cannot be inverted "
                                        "into a symplectic 3-form");
    return SymplecticForm3::constant(right_inverse(*c, tol));
}

NambuSystem to_nambu_system(const SystemFile& sf, double tol) {
    NambuSystem sys;
    sys.n = sf.n;
    sys.J = operator_from(sf, tol);
    sys.G = sf.g;
    sys.H = sf.h;
    sys.label = sf.label;
    return sys;
}

} // namespace nambu
