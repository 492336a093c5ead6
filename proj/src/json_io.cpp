#include "nambu/json_io.hpp"

#include <cstdio>
#include <sstream>

namespace nambu {

namespace {

void dump_value(std::ostream& os, const Json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) { os << "{}"; return; }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << '"' << it.key() << "\": ";
            dump_value(os, it.value(), indent, depth + 1);
        }
        os << '\n' << close_pad << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) { os << "[]"; return; }
        os << "[\n";
        bool first = true;
        for (const auto& v : j) {
            if (!first) os << ",\n";
            first = false;
            os << pad;
            dump_value(os, v, indent, depth + 1);
        }
        os << '\n' << close_pad << ']';
        return;
    }
    case Json::value_t::number_float: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
        os << buf;
        return;
    }
    default: os << j.dump(); return;
    }
}

} // namespace

std::string dump_fixed(const Json& j, int indent) {
    std::ostringstream os;
    dump_value(os, j, indent, 0);
    os << '\n';
    return os.str();
}

Json to_json(const ResidualReport& r) {
    Json idx = Json::array();
    for (int i : r.argmax_indices) idx.push_back(i + 1);
    return Json{{"max_abs", r.max_abs}, {"point", r.argmax_point}, {"indices", idx},
                {"samples", r.samples}};
}

Json to_json(const KernelBasis& kb) {
    Json basis = Json::array();
    for (const auto& c : kb.basis) basis.push_back(c);
    return Json{{"dimension", kb.dimension()}, {"basis", basis}};
}

Json to_json(const SemiCasimirPair& p) {
    return Json{{"u", p.u},
                {"v", p.v},
                {"norm_Ju", p.norm_ju},
                {"norm_Jv", p.norm_jv},
                {"norm_Juv", p.norm_juv}};
}

Json to_json(const DriftStat& d) {
    return Json{{"initial", d.initial}, {"max_abs_drift", d.max_abs_drift},
                {"rel_drift", d.rel_drift}};
}

Json to_json(const SkewTensor3& t) {
    Json entries = Json::array();
    for (const auto& tr : t.triples()) {
        double v = t.canonical(tr[0], tr[1], tr[2]);
        if (v == 0.0) continue;
        entries.push_back(Json{{"i", tr[0] + 1}, {"j", tr[1] + 1}, {"k", tr[2] + 1}, {"value", v}});
    }
    return Json{{"dimension", t.dim()},
                {"variance", t.variance() == Variance::covariant ? "covariant" : "contravariant"},
                {"kind", "constant"},
                {"entries", entries}};
}

} // namespace nambu
