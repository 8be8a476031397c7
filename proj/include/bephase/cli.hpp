#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bephase/tolerances.hpp"

namespace bephase::cli {

inline constexpr const char* kVersion = "bephase 0.1.0";

// exit codes: 0 success / certificate, 2 inconclusive (NotFound), 1 error
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

struct CommonConfig {
    std::uint64_t seed = 20240101;
    std::size_t dim_cap = 4096;
    Tolerances tol{};
    std::string out;  // report path; per-command default when empty
};

struct MakeStateOptions {
    CommonConfig common;
    std::string kind;  // cv-bes | spurious | isotropic | max-ent | random
    double a = 0.4, c = 0.6;
    std::size_t n = 6;
    std::size_t m = 3;
    double f = 0.7;
    std::size_t dim_a = 3, dim_b = 3, rank = 9;
    std::size_t blocks = 2;
    std::vector<double> weights;
    std::string sigma_path;  // spurious block source; shipped fixture when empty
};

struct AnalyzeOptions {
    CommonConfig common;
    std::string state_path;
    std::vector<int> p_list{2, 3};
};

struct DistillOptions {
    CommonConfig common;
    std::string state_path;
    std::size_t n_max = 1;
    int restarts = 32;
    int max_iters = 200;
};

struct BallOptions {
    CommonConfig common;
    std::string state_path;
    double eta = 0.0;  // 0: use 0.9x the certified radius
    int samples = 100;
    int p = 0;  // 0: distillability certificate; >= 2: Lambda_p witness at Psi_+
    std::size_t n_max = 1;
    int restarts = 32;
};

struct DensityOptions {
    CommonConfig common;
    std::string state_path;
    std::size_t n_from = 2, n_to = 6;
    int p = 0;  // 0: rank-2 certificates; >= 2: Schmidt-rank-p variant
    std::string csv;  // CSV path (N, distance, epsilon)
};

struct ProtocolOptions {
    CommonConfig common;
    std::string state_path;
    int p = 2;
    std::string psi_path;  // violation vector; defaults to Psi_+, then the PT eigenvector
};

struct WitnessOptions {
    CommonConfig common;
    std::string state_path;
    int restarts = 24;
    int samples = 2000;
};

struct SweepOptions {
    CommonConfig common;
    int count = 10;
    int s = 2;
    std::string csv;
};

int run_make_state(const MakeStateOptions& opt);
int run_analyze(const AnalyzeOptions& opt);
int run_distill(const DistillOptions& opt);
int run_ball(const BallOptions& opt);
int run_density(const DensityOptions& opt);
int run_protocol(const ProtocolOptions& opt);
int run_witness(const WitnessOptions& opt);
int run_witness_sweep(const SweepOptions& opt);

}  // namespace bephase::cli
