#include <cstdio>
#include <cstdlib>
#include <cxxabi.h>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "bephase/cli.hpp"
#include "bephase/io.hpp"
#include "bephase/linalg.hpp"

using namespace bephase;

namespace {

std::string error_code(const std::exception& e) {
    int status = 0;
    char* demangled = abi::__cxa_demangle(typeid(e).name(), nullptr, nullptr, &status);
    std::string name = (status == 0 && demangled) ? demangled : typeid(e).name();
    std::free(demangled);
    if (auto pos = name.rfind("::"); pos != std::string::npos) name = name.substr(pos + 2);
    return name;
}

void add_common(CLI::App* cmd, cli::CommonConfig& common) {
    cmd->add_option("--seed", common.seed, "base RNG seed")->envname("BEPHASE_SEED");
    cmd->add_option("--dim-cap", common.dim_cap, "n-copy matrix dimension cap");
    cmd->add_option("--out", common.out, "output JSON path");
    cmd->add_option("--psd-tol", common.tol.psd, "PSD eigenvalue tolerance");
    cmd->add_option("--herm-tol", common.tol.hermiticity, "hermiticity tolerance");
    cmd->add_option("--rank-tol", common.tol.rank, "rank / Schmidt threshold");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bephase: finite-truncation toolkit for bound entanglement, distillability "
                 "certificates, and Schmidt-number protocols"};
    app.require_subcommand(1);

    cli::MakeStateOptions make_opt;
    auto* make = app.add_subcommand("make-state", "construct a state and write it as JSON");
    add_common(make, make_opt.common);
    make->add_option("kind", make_opt.kind, "cv-bes | spurious | isotropic | max-ent | random")
        ->required();
    make->add_option("--a", make_opt.a, "cv-bes decay a (0 < a < c < 1)");
    make->add_option("--c", make_opt.c, "cv-bes decay c");
    make->add_option("--n", make_opt.n, "cv-bes truncation N");
    make->add_option("--m", make_opt.m, "local dimension (isotropic, max-ent)");
    make->add_option("--f", make_opt.f, "isotropic fidelity");
    make->add_option("--dim-a", make_opt.dim_a, "random state dim A");
    make->add_option("--dim-b", make_opt.dim_b, "random state dim B");
    make->add_option("--rank", make_opt.rank, "random state rank");
    make->add_option("--blocks", make_opt.blocks, "spurious block count");
    make->add_option("--weights", make_opt.weights, "spurious block weights (renormalized)");
    make->add_option("--sigma", make_opt.sigma_path, "spurious 3x3 source state (default: fixture)");

    cli::AnalyzeOptions analyze_opt;
    auto* analyze = app.add_subcommand("analyze", "PPT, realignment, and Lambda_p witness report");
    add_common(analyze, analyze_opt.common);
    analyze->add_option("state", analyze_opt.state_path, "state JSON")->required();
    analyze->add_option("--p", analyze_opt.p_list, "Lambda_p values to evaluate");

    cli::DistillOptions distill_opt;
    auto* distill = app.add_subcommand("distill", "search rank-2 distillability certificates");
    add_common(distill, distill_opt.common);
    distill->add_option("state", distill_opt.state_path, "state JSON")->required();
    distill->add_option("--n-max", distill_opt.n_max, "max copy count");
    distill->add_option("--restarts", distill_opt.restarts, "search restarts");
    distill->add_option("--max-iters", distill_opt.max_iters, "iterations per restart");

    cli::BallOptions ball_opt;
    auto* ball = app.add_subcommand("ball", "perturbation-ball witness stability report");
    add_common(ball, ball_opt.common);
    ball->add_option("state", ball_opt.state_path, "state JSON")->required();
    ball->add_option("--eta", ball_opt.eta, "trace-norm ball radius (default 0.9x certified)");
    ball->add_option("--samples", ball_opt.samples, "perturbation samples");
    ball->add_option("--p", ball_opt.p, "use the Lambda_p witness instead of a certificate");
    ball->add_option("--n-max", ball_opt.n_max, "max copy count for the certificate search");
    ball->add_option("--restarts", ball_opt.restarts, "search restarts");

    cli::DensityOptions density_opt;
    auto* density = app.add_subcommand("density", "distillable approximant sequence rho_N");
    add_common(density, density_opt.common);
    density->add_option("state", density_opt.state_path, "state JSON")->required();
    density->add_option("--n-from", density_opt.n_from, "first truncation N");
    density->add_option("--n-to", density_opt.n_to, "last truncation N");
    density->add_option("--p", density_opt.p, "Schmidt-rank-p variant (0 = rank-2 certificates)");
    density->add_option("--csv", density_opt.csv, "CSV output path");

    cli::ProtocolOptions protocol_opt;
    auto* protocol = app.add_subcommand("protocol", "single-copy Schmidt-number protocol");
    add_common(protocol, protocol_opt.common);
    protocol->add_option("state", protocol_opt.state_path, "state JSON")->required();
    protocol->add_option("--p", protocol_opt.p, "target Schmidt number");
    protocol->add_option("--psi", protocol_opt.psi_path, "violating vector JSON");

    cli::WitnessOptions witness_opt;
    auto* witness = app.add_subcommand("witness", "edge-state analysis and witness construction");
    add_common(witness, witness_opt.common);
    witness->add_option("state", witness_opt.state_path, "state JSON")->required();
    witness->add_option("--restarts", witness_opt.restarts, "see-saw restarts");
    witness->add_option("--samples", witness_opt.samples, "product sampling budget");

    cli::SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("witness-sweep",
                                     "probe Schmidt numbers across random edge-like states");
    add_common(sweep, sweep_opt.common);
    sweep->add_option("--count", sweep_opt.count, "number of states");
    sweep->add_option("--s", sweep_opt.s, "probe Schmidt rank");
    sweep->add_option("--csv", sweep_opt.csv, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*make) {
            set_default_tolerances(make_opt.common.tol);
            return cli::run_make_state(make_opt);
        }
        if (*analyze) {
            set_default_tolerances(analyze_opt.common.tol);
            return cli::run_analyze(analyze_opt);
        }
        if (*distill) {
            set_default_tolerances(distill_opt.common.tol);
            return cli::run_distill(distill_opt);
        }
        if (*ball) {
            set_default_tolerances(ball_opt.common.tol);
            return cli::run_ball(ball_opt);
        }
        if (*density) {
            set_default_tolerances(density_opt.common.tol);
            return cli::run_density(density_opt);
        }
        if (*protocol) {
            set_default_tolerances(protocol_opt.common.tol);
            return cli::run_protocol(protocol_opt);
        }
        if (*witness) {
            set_default_tolerances(witness_opt.common.tol);
            return cli::run_witness(witness_opt);
        }
        if (*sweep) {
            set_default_tolerances(sweep_opt.common.tol);
            return cli::run_witness_sweep(sweep_opt);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "{\"error\": \"%s\", \"message\": \"%s\"}\n", error_code(e).c_str(),
                     e.what());
        return cli::kExitError;
    }
    return cli::kExitError;
}
