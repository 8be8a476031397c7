#include "bephase/cli.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include "bephase/fixture.hpp"
#include "bephase/io.hpp"

namespace bephase::cli {

using io::json;

namespace {

json tolerances_json(const Tolerances& tol) {
    return json{{"hermiticity", tol.hermiticity}, {"psd", tol.psd},
                {"unit_trace", tol.unit_trace},   {"jacobi", tol.jacobi},
                {"rank", tol.rank},               {"residual", tol.residual},
                {"witness", tol.witness}};
}

json config_json(const CommonConfig& common, const char* command, json params) {
    return json{{"version", kVersion},
                {"command", command},
                {"seed", common.seed},
                {"dim_cap", common.dim_cap},
                {"tolerances", tolerances_json(common.tol)},
                {"params", std::move(params)}};
}

void emit(const CommonConfig& common, const std::string& fallback, json report) {
    const std::string path = common.out.empty() ? fallback : common.out;
    io::write_text_file(path, io::dump_json_17(report) + "\n");
    std::printf("report written to %s\n", path.c_str());
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::string text = header + "\n";
    for (const auto& r : rows) text += r + "\n";
    io::write_text_file(path, text);
    std::printf("csv written to %s\n", path.c_str());
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

DensityOperator load_state(const std::string& path) {
    return io::state_from_json(io::read_json_file(path));
}

Rank2SearchParams search_params(const CommonConfig& common, int restarts, int max_iters) {
    Rank2SearchParams p;
    p.restarts = restarts;
    p.max_iters = max_iters;
    p.dim_cap = common.dim_cap;
    p.seed = common.seed;
    return p;
}

// default violation vector for protocol-style commands: Psi_+ when it
// violates, otherwise the normalized PT-negative eigenvector
std::optional<BipartiteVector> default_violation_vector(const DensityOperator& rho, int p) {
    if (rho.dim_a == rho.dim_b) {
        auto plus = maximally_entangled(rho.dim_a);
        if (p_reduction_value(rho, plus, p).value < 0.0) return plus;
    }
    auto ppt = ppt_check(rho);
    if (!ppt.ppt) {
        BipartiteVector psi(rho.dim_a, rho.dim_b, ppt.eigenvector);
        psi.normalize();
        if (p_reduction_value(rho, psi, p).value < 0.0) return psi;
    }
    return std::nullopt;
}

}  // namespace

int run_make_state(const MakeStateOptions& opt) {
    json report;
    std::string default_out = "state.json";

    if (opt.kind == "max-ent") {
        auto v = maximally_entangled(opt.m);
        auto sd = schmidt_decompose(v, opt.common.tol.rank);
        report = io::vector_to_json(v);
        std::printf("norm = %.17g\nschmidt rank = %zu\n", v.norm(), sd.rank);
    } else {
        DensityOperator rho;
        if (opt.kind == "cv-bes") {
            rho = cv_bes({opt.a, opt.c, opt.n});
        } else if (opt.kind == "isotropic") {
            rho = isotropic(opt.m, opt.f);
        } else if (opt.kind == "random") {
            rho = random_density(opt.dim_a, opt.dim_b, opt.rank, opt.common.seed);
        } else if (opt.kind == "spurious") {
            DensityOperator sigma =
                opt.sigma_path.empty() ? ppt_entangled_fixture() : load_state(opt.sigma_path);
            std::vector<double> weights = opt.weights;
            if (weights.empty())
                for (std::size_t b = 0; b < opt.blocks; ++b)
                    weights.push_back(1.0 / static_cast<double>(b + 1));
            rho = spurious_block_state(sigma, opt.blocks, weights);
        } else {
            throw InvalidParamsError("unknown state kind: " + opt.kind);
        }
        rho.validate(opt.common.tol);

        auto ppt = ppt_check(rho, opt.common.tol);
        const double realign = realignment_value(rho);
        report = io::state_to_json(rho);
        std::printf("trace = %.17g\nppt = %s (min PT eigenvalue = %.6e)\nrealignment = %.12f\n",
                    rho.mat.trace().real(), ppt.ppt ? "true" : "false", ppt.min_eigenvalue,
                    realign);
    }

    const std::string path = opt.common.out.empty() ? default_out : opt.common.out;
    io::write_text_file(path, io::dump_json_17(report) + "\n");
    std::printf("state written to %s\n", path.c_str());
    return kExitOk;
}

int run_analyze(const AnalyzeOptions& opt) {
    auto rho = load_state(opt.state_path);
    auto ppt = ppt_check(rho, opt.common.tol);
    const std::string ref = io::state_hash(rho);

    json witnesses = json::array();
    std::vector<std::pair<std::string, BipartiteVector>> candidates;
    if (rho.dim_a == rho.dim_b)
        candidates.emplace_back("psi_plus", maximally_entangled(rho.dim_a));
    if (!ppt.ppt) {
        BipartiteVector psi(rho.dim_a, rho.dim_b, ppt.eigenvector);
        psi.normalize();
        candidates.emplace_back("pt_negative_eigenvector", std::move(psi));
    }
    for (int p : opt.p_list) {
        auto per_p = candidates;
        // the optimal vector for this p: minimal eigenvector of the mapped operator
        ComplexMatrix mapped = kron(rho.reduced(Side::A), ComplexMatrix::identity(rho.dim_b));
        ComplexMatrix scaled = rho.mat;
        scaled *= cplx(1.0 / (p - 1.0), 0.0);
        mapped -= scaled;
        auto sp = eig_hermitian(mapped);
        BipartiteVector opt_psi(rho.dim_a, rho.dim_b, sp.eigenvector(sp.eigenvalues.size() - 1));
        opt_psi.normalize();
        per_p.emplace_back("mapped_min_eigenvector", std::move(opt_psi));

        for (const auto& [name, psi] : per_p) {
            auto wv = p_reduction_value(rho, psi, p);
            json w = io::witness_to_json(wv, ref);
            w["candidate"] = name;
            witnesses.push_back(std::move(w));
            std::printf("Lambda_%d at %s: value = %.12g\n", p, name.c_str(), wv.value);
        }
    }

    json report = config_json(opt.common, "analyze", json{{"state", opt.state_path}});
    report["state_ref"] = ref;
    report["ppt"] = ppt.ppt;
    report["pt_min_eigenvalue"] = ppt.min_eigenvalue;
    report["realignment"] = realignment_value(rho);
    report["witness_values"] = std::move(witnesses);

    // isotropic inputs additionally carry the Schmidt-number bound
    if (rho.dim_a == rho.dim_b) {
        auto tw = twirl_exact(rho);
        ComplexMatrix diff = tw.mat;
        diff -= rho.mat;
        if (diff.max_abs() < 1e-10) {
            const double fidelity = expectation(rho.mat, maximally_entangled(rho.dim_a).amps);
            const int bound = isotropic_schmidt_bound(rho.dim_a, fidelity, opt.common.tol.witness);
            report["isotropic"] = json{{"m", rho.dim_a}, {"F", fidelity},
                                       {"schmidt_number_lower_bound", bound}};
            std::printf("isotropic state: F = %.12g, schmidt number >= %d\n", fidelity, bound);
        }
    }

    std::printf("ppt = %s\n", ppt.ppt ? "true" : "false");
    emit(opt.common, "analysis.json", std::move(report));
    return kExitOk;
}

int run_distill(const DistillOptions& opt) {
    auto rho = load_state(opt.state_path);
    auto result = certify_distillable(rho, opt.n_max,
                                      search_params(opt.common, opt.restarts, opt.max_iters));

    json report = config_json(opt.common, "distill",
                              json{{"state", opt.state_path},
                                   {"n_max", opt.n_max},
                                   {"restarts", opt.restarts},
                                   {"max_iters", opt.max_iters}});
    report["n_reached"] = result.n_reached;

    if (result.certificate) {
        const auto& cert = *result.certificate;
        report["certificate"] = io::certificate_to_json(cert, io::state_hash(rho));
        report["stability_radius"] = stability_radius(cert);
        auto [pa, pb] = certificate_projectors(cert);
        report["projectors"] =
            json{{"P_A", io::matrix_to_json(pa)}, {"P_B", io::matrix_to_json(pb)}};
        std::printf("distillable: n = %zu, epsilon = %.12g, radius = %.12g\n", cert.n_copies,
                    cert.epsilon, stability_radius(cert));
        emit(opt.common, "distill.json", std::move(report));
        return kExitOk;
    }
    report["certificate"] = nullptr;
    report["status"] = "inconclusive";
    std::printf("no certificate up to n = %zu (inconclusive, not a non-distillability proof)\n",
                opt.n_max);
    emit(opt.common, "distill.json", std::move(report));
    return kExitInconclusive;
}

int run_ball(const BallOptions& opt) {
    auto rho = load_state(opt.state_path);
    json params{{"state", opt.state_path}, {"eta", opt.eta},
                {"samples", opt.samples},  {"p", opt.p},
                {"n_max", opt.n_max}};
    json report = config_json(opt.common, "ball", std::move(params));

    BallReport ball;
    if (opt.p >= 2) {
        auto psi = default_violation_vector(rho, opt.p);
        if (!psi) {
            std::printf("no negative Lambda_%d witness at the default vectors (inconclusive)\n",
                        opt.p);
            report["status"] = "inconclusive";
            emit(opt.common, "ball.json", std::move(report));
            return kExitInconclusive;
        }
        auto wv = p_reduction_value(rho, *psi, opt.p);
        const double eta = opt.eta > 0.0 ? opt.eta : 0.9 * p_stability_radius(wv);
        ball = perturb_and_verify(rho, wv, eta, opt.samples, opt.common.seed);
        report["witness"] = io::witness_to_json(wv, io::state_hash(rho));
        report["radius"] = p_stability_radius(wv);
    } else {
        auto found = certify_distillable(rho, opt.n_max, search_params(opt.common, opt.restarts, 200));
        if (!found.certificate) {
            std::printf("no distillability certificate to perturb (inconclusive)\n");
            report["status"] = "inconclusive";
            emit(opt.common, "ball.json", std::move(report));
            return kExitInconclusive;
        }
        const auto& cert = *found.certificate;
        const double eta = opt.eta > 0.0 ? opt.eta : 0.9 * stability_radius(cert);
        ball = perturb_and_verify(rho, cert, eta, opt.samples, opt.common.seed);
        report["certificate"] = io::certificate_to_json(cert, io::state_hash(rho));
        report["radius"] = stability_radius(cert);
    }

    report["ball"] = io::ball_report_to_json(ball);
    std::printf("eta = %.12g: %d / %d violations (max value %.6e, max distance %.6e)\n", ball.eta,
                ball.violations, ball.samples, ball.max_value, ball.max_distance);
    emit(opt.common, "ball.json", std::move(report));
    return kExitOk;
}

int run_density(const DensityOptions& opt) {
    auto rho = load_state(opt.state_path);
    json report = config_json(opt.common, "density",
                              json{{"state", opt.state_path},
                                   {"n_from", opt.n_from},
                                   {"n_to", opt.n_to},
                                   {"p", opt.p}});
    const std::string ref = io::state_hash(rho);

    json rows = json::array();
    std::vector<std::string> csv_rows;
    if (opt.p >= 2) {
        for (const auto& row : density_demo_p(rho, opt.n_from, opt.n_to, opt.p)) {
            rows.push_back(json{{"N", row.n_trunc},
                                {"distance", row.distance},
                                {"witness", io::witness_to_json(row.witness, ref)}});
            csv_rows.push_back(std::to_string(row.n_trunc) + "," + fmt17(row.distance) + "," +
                               fmt17(row.witness.value));
            std::printf("N = %zu: distance = %.12g, Lambda_%d value = %.12g\n", row.n_trunc,
                        row.distance, opt.p, row.witness.value);
        }
    } else {
        for (const auto& row : density_demo(rho, opt.n_from, opt.n_to)) {
            rows.push_back(json{{"N", row.n_trunc},
                                {"distance", row.distance},
                                {"certificate", io::certificate_to_json(row.cert, ref)}});
            csv_rows.push_back(std::to_string(row.n_trunc) + "," + fmt17(row.distance) + "," +
                               fmt17(row.cert.epsilon));
            std::printf("N = %zu: distance = %.12g, epsilon = %.12g\n", row.n_trunc, row.distance,
                        row.cert.epsilon);
        }
    }
    report["rows"] = std::move(rows);
    write_csv(opt.csv.empty() ? "density.csv" : opt.csv, "N,distance,epsilon", csv_rows);
    emit(opt.common, "density.json", std::move(report));
    return kExitOk;
}

int run_protocol(const ProtocolOptions& opt) {
    auto rho = load_state(opt.state_path);

    BipartiteVector psi;
    if (!opt.psi_path.empty()) {
        psi = io::vector_from_json(io::read_json_file(opt.psi_path));
        psi.normalize();
    } else {
        auto found = default_violation_vector(rho, opt.p);
        if (!found)
            throw NoViolationError("no violating vector found; supply one with --psi");
        psi = std::move(*found);
    }

    auto cert = bephase::run_protocol(rho, psi, opt.p);
    json report = config_json(opt.common, "protocol",
                              json{{"state", opt.state_path}, {"p", opt.p}});
    report["certificate"] = io::schmidt_certificate_to_json(cert, io::state_hash(rho));
    report["threshold"] = (cert.p - 1.0) / static_cast<double>(cert.m);
    std::printf("schmidt certificate: m = %zu, F = %.12g > (p-1)/m = %.12g, p = %d\n", cert.m,
                cert.fidelity, (cert.p - 1.0) / static_cast<double>(cert.m), cert.p);
    emit(opt.common, "protocol.json", std::move(report));
    return kExitOk;
}

int run_witness(const WitnessOptions& opt) {
    auto rho = load_state(opt.state_path);

    WitnessBuildParams params;
    params.restarts = opt.restarts;
    params.samples = opt.samples;
    params.seed = opt.common.seed;
    auto w = build_edge_witness(rho, params);

    ProductSearchParams edge_params;
    edge_params.restarts = opt.restarts;
    edge_params.seed = derive_seed(opt.common.seed, 1);
    auto edge = is_edge_state(rho, edge_params);

    // orthogonality identity, asserted on every constructed witness
    const auto wmat = w.matrix();
    cplx tr = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i)
        for (std::size_t j = 0; j < rho.dim(); ++j) tr += wmat(i, j) * rho.mat(j, i);

    json report = config_json(opt.common, "witness", json{{"state", opt.state_path}});
    report["state_ref"] = io::state_hash(rho);
    report["witness"] = io::edge_witness_to_json(w);
    report["trace_against_state"] = tr.real();
    report["edge_status"] =
        edge.status == EdgeStatus::not_edge ? "not_edge" : "edge_numeric_inconclusive";
    report["edge_best_residual"] = edge.best_residual;
    report["maximal_ranks"] = has_maximal_edge_ranks(rho);

    std::printf("witness epsilon = %.12g, Tr(W delta) = %.12g\nedge status: %s\n", w.epsilon,
                tr.real(), report["edge_status"].get<std::string>().c_str());
    emit(opt.common, "witness.json", std::move(report));
    return kExitOk;
}

int run_witness_sweep(const SweepOptions& opt) {
    std::vector<std::string> rows;
    int built = 0, skipped = 0;
    for (int t = 0; t < opt.count; ++t) {
        Rng rng(derive_seed(opt.common.seed, t));
        TilesAngles angles{rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2),
                           rng.uniform(0.3, 1.2)};
        auto delta = tiles_complement_state(angles);
        const std::string ref = io::state_hash(delta);

        EdgeWitness w;
        try {
            WitnessBuildParams params;
            params.seed = derive_seed(opt.common.seed, 1000 + t);
            w = build_edge_witness(delta, params);
        } catch (const ZeroEpsilonError&) {
            ++skipped;
            continue;
        }
        ++built;

        // P = P1 + |Psi><Psi| with Psi the first kernel vector of delta
        auto rk = range_kernel(delta);
        std::vector<cplx> kernel_vec(delta.dim());
        for (std::size_t i = 0; i < delta.dim(); ++i) kernel_vec[i] = rk.kernel(i, 0);
        ProbeConstraints cons;
        cons.p1 = w.p;
        cons.p1 -= outer(kernel_vec, kernel_vec);
        cons.q = w.q;
        cons.psi = kernel_vec;

        ComplexMatrix w_plus_eps = w.matrix();
        ComplexMatrix shift = ComplexMatrix::identity(delta.dim());
        shift *= cplx(w.epsilon, 0.0);
        w_plus_eps += shift;

        bool found = false;
        double value = 0.0;
        try {
            ProductSearchParams probe_params;
            probe_params.seed = derive_seed(opt.common.seed, 2000 + t);
            auto probe = schmidt_probe_search(w_plus_eps, delta.dim_a, delta.dim_b, opt.s, cons,
                                              probe_params);
            if (probe) {
                found = true;
                value = probe->value;
            }
        } catch (const InfeasibleConstraintsError&) {
        }
        rows.push_back(ref + "," + std::to_string(opt.s) + "," + (found ? "1" : "0") + "," +
                       fmt17(value));
    }

    std::printf("sweep: %d witnesses built, %d degenerate, %zu rows\n", built, skipped,
                rows.size());
    write_csv(opt.csv.empty() ? "sweep.csv" : opt.csv, "state_hash,s,found,value", rows);
    return kExitOk;
}

}  // namespace bephase::cli
