#include "bephase/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bephase::io {

namespace {

json cplx_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("complex entries must be [re, im] pairs");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

void format_double(std::string& out, double v) {
    char buf[40];
    if (std::isfinite(v)) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    } else {
        out += "null";
    }
}

void escape_string(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void dump_rec(std::string& out, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                escape_string(out, it.key());
                out += ": ";
                dump_rec(out, it.value(), indent, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // flat arrays of numbers stay on one line
            bool scalar_only = true;
            for (const auto& el : j)
                if (el.is_structured()) scalar_only = false;
            if (scalar_only) {
                out += "[";
                bool first = true;
                for (const auto& el : j) {
                    if (!first) out += ", ";
                    first = false;
                    dump_rec(out, el, indent, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_rec(out, el, indent, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::string:
            escape_string(out, j.get<std::string>());
            return;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            return;
        case json::value_t::number_integer:
            out += std::to_string(j.get<std::int64_t>());
            return;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<std::uint64_t>());
            return;
        case json::value_t::number_float:
            format_double(out, j.get<double>());
            return;
        default:
            out += "null";
            return;
    }
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(cplx_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw ParseError("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = cplx_from_json(j[i][c]);
    }
    return m;
}

json state_to_json(const DensityOperator& rho) {
    return json{{"dim_a", rho.dim_a}, {"dim_b", rho.dim_b}, {"matrix", matrix_to_json(rho.mat)}};
}

DensityOperator state_from_json(const json& j) {
    try {
        DensityOperator rho{j.at("dim_a").get<std::size_t>(), j.at("dim_b").get<std::size_t>(),
                            matrix_from_json(j.at("matrix"))};
        rho.validate();
        return rho;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad state json: ") + e.what());
    }
}

json vector_to_json(const BipartiteVector& v) {
    json amps = json::array();
    for (const auto& z : v.amps) amps.push_back(cplx_to_json(z));
    return json{{"dim_a", v.dim_a}, {"dim_b", v.dim_b}, {"amps", std::move(amps)}};
}

BipartiteVector vector_from_json(const json& j) {
    try {
        const auto& amps = j.at("amps");
        std::vector<cplx> data;
        data.reserve(amps.size());
        for (const auto& el : amps) data.push_back(cplx_from_json(el));
        return BipartiteVector{j.at("dim_a").get<std::size_t>(), j.at("dim_b").get<std::size_t>(),
                               std::move(data)};
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad vector json: ") + e.what());
    }
}

std::string state_hash(const DensityOperator& rho) {
    const std::string text = dump_json_17(state_to_json(rho), 0);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json witness_to_json(const WitnessValue& wv, const std::string& state_ref) {
    return json{{"p", wv.p},
                {"value", wv.value},
                {"psi", vector_to_json(wv.psi)},
                {"state_ref", state_ref}};
}

WitnessValue witness_from_json(const json& j) {
    try {
        WitnessValue wv;
        wv.p = j.at("p").get<int>();
        wv.value = j.at("value").get<double>();
        wv.psi = vector_from_json(j.at("psi"));
        return wv;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad witness json: ") + e.what());
    }
}

WitnessValue witness_from_json_validated(const json& j, const DensityOperator& rho) {
    WitnessValue wv = witness_from_json(j);
    const double recomputed = witness_value_recompute(rho, wv);
    if (std::abs(recomputed - wv.value) > 1e-12)
        throw ParseError("witness value does not revalidate against the state");
    return wv;
}

json certificate_to_json(const DistillCertificate& cert, const std::string& state_ref) {
    return json{{"n_copies", cert.n_copies},
                {"epsilon", cert.epsilon},
                {"psi", vector_to_json(cert.psi)},
                {"state_ref", state_ref}};
}

DistillCertificate certificate_from_json(const json& j) {
    try {
        DistillCertificate cert;
        cert.n_copies = j.at("n_copies").get<std::size_t>();
        cert.epsilon = j.at("epsilon").get<double>();
        cert.psi = vector_from_json(j.at("psi"));
        return cert;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad certificate json: ") + e.what());
    }
}

json ball_report_to_json(const BallReport& report) {
    return json{{"eta", report.eta},         {"n_copies", report.n_copies},
                {"epsilon", report.epsilon}, {"samples", report.samples},
                {"violations", report.violations}, {"max_value", report.max_value},
                {"max_distance", report.max_distance}};
}

json schmidt_certificate_to_json(const SchmidtCertificate& cert, const std::string& state_ref) {
    return json{{"m", cert.m},
                {"F", cert.fidelity},
                {"p", cert.p},
                {"filter", matrix_to_json(cert.filter)},
                {"witness", witness_to_json(cert.witness, state_ref)}};
}

json edge_witness_to_json(const EdgeWitness& w) {
    return json{{"dim_a", w.dim_a},
                {"dim_b", w.dim_b},
                {"P", matrix_to_json(w.p)},
                {"Q", matrix_to_json(w.q)},
                {"epsilon", w.epsilon}};
}

EdgeWitness edge_witness_from_json(const json& j) {
    try {
        EdgeWitness w;
        w.dim_a = j.at("dim_a").get<std::size_t>();
        w.dim_b = j.at("dim_b").get<std::size_t>();
        w.p = matrix_from_json(j.at("P"));
        w.q = matrix_from_json(j.at("Q"));
        w.epsilon = j.at("epsilon").get<double>();
        return w;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad edge witness json: ") + e.what());
    }
}

std::string dump_json_17(const json& j, int indent) {
    std::string out;
    dump_rec(out, j, indent, 0);
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open: " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw ParseError(std::string("json parse failed: ") + e.what());
    }
}

}  // namespace bephase::io
