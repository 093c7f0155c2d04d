#include "markovgap/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace markovgap {

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

void write_json(const json& j, int indent, int depth, std::string& out) {
    const auto newline = [&](int level) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * level), ' ');
    };
    switch (j.type()) {
        case json::value_t::number_float: {
            const double x = j.get<double>();
            // JSON has no literal for non-finite values.
            out += std::isfinite(x) ? format_number(x) : "null";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                write_json(v, indent, depth + 1, out);
            }
            newline(depth);
            out += ']';
            return;
        }
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                write_json(it.value(), indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        default:
            out += j.dump();
    }
}

json candidate_to_json(const Candidate& c) {
    if (const auto* spec = std::get_if<MarkovSpec>(&c)) return {{"type", "markov"}, {"spec", markov_spec_to_json(*spec)}};
    if (const auto* w = std::get_if<WernerParameter>(&c)) return {{"type", "werner"}, {"d", w->d}, {"f", w->f}};
    return nullptr;
}

}  // namespace

std::string dump_json(const json& j, int indent) {
    std::string out;
    write_json(j, indent, 0, out);
    return out;
}

json operator_to_json(const Operator& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Operator operator_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw Error("matrix must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Operator m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw Error("ragged matrix rows");
        for (Eigen::Index k = 0; k < cols; ++k) {
            const json& e = row[static_cast<std::size_t>(k)];
            if (!e.is_array() || e.size() != 2) throw Error("matrix entries must be [re, im] pairs");
            m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

json markov_spec_to_json(const MarkovSpec& spec) {
    json blocks = json::array();
    for (const auto& b : spec.blocks)
        blocks.push_back({{"p", b.p},
                          {"dimCL", b.dim_cl},
                          {"dimCR", b.dim_cr},
                          {"left", operator_to_json(b.left.op())},
                          {"right", operator_to_json(b.right.op())}});
    json j = {{"dimA", spec.dim_a}, {"dimB", spec.dim_b}, {"blocks", std::move(blocks)}};
    if (spec.basis_c) j["basisC"] = operator_to_json(*spec.basis_c);
    return j;
}

MarkovSpec markov_spec_from_json(const json& j) {
    try {
        MarkovSpec spec;
        spec.dim_a = j.at("dimA").get<std::size_t>();
        spec.dim_b = j.at("dimB").get<std::size_t>();
        for (const auto& b : j.at("blocks")) {
            const auto dcl = b.at("dimCL").get<std::size_t>();
            const auto dcr = b.at("dimCR").get<std::size_t>();
            spec.blocks.push_back(MarkovBlock{b.at("p").get<double>(), dcl, dcr,
                                              DensityOperator(operator_from_json(b.at("left")), Layout({spec.dim_a, dcl})),
                                              DensityOperator(operator_from_json(b.at("right")), Layout({dcr, spec.dim_b}))});
        }
        if (j.contains("basisC")) spec.basis_c = operator_from_json(j.at("basisC"));
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed Markov spec: ") + e.what());
    }
}

json report_to_json(const OptimizationReport& r) {
    return {{"quantity", r.quantity},
            {"value", r.value},
            {"bound_kind", to_string(r.bound_kind)},
            {"iterations", r.iterations},
            {"restarts", r.restarts},
            {"seed", r.seed},
            {"certificate", r.certificate},
            {"candidate", candidate_to_json(r.candidate)}};
}

json suite_report_to_json(const SuiteReport& report) {
    json props = json::array();
    for (const auto& p : report.properties)
        props.push_back({{"name", p.name}, {"samples", p.samples}, {"worst_margin", p.worst_margin}, {"pass", p.pass}});
    return {{"suite", report.suite}, {"seed", report.seed}, {"properties", std::move(props)}};
}

json witness_to_json(const NaiveRenyiWitness& w) {
    return {{"seed", w.seed},   {"sample", w.sample}, {"rank", w.rank},
            {"alpha", w.alpha}, {"value", w.value},   {"state", operator_to_json(w.state)}};
}

NaiveRenyiWitness witness_from_json(const json& j) {
    try {
        NaiveRenyiWitness w;
        w.seed = j.at("seed").get<std::uint64_t>();
        w.sample = j.at("sample").get<std::uint64_t>();
        w.rank = j.at("rank").get<std::size_t>();
        w.alpha = j.at("alpha").get<double>();
        w.value = j.at("value").get<double>();
        w.state = operator_from_json(j.at("state"));
        return w;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed witness: ") + e.what());
    }
}

}  // namespace markovgap
