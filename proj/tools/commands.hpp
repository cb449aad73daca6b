#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace magyc::cli {

struct SimulateOptions {
    std::string kind = "WAM";
    int runs = 1;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

struct CalibrateOptions {
    std::string method = "magyc-bfg";
    std::string input;
    std::string output;
    int window = 0;  // 0: derive from the stream's nominal rate
    std::string scheme = "central";
    double sigma_residual = 0.001;
    double sigma_norm = 0.01;
    double norm_target = 1.0;
    double rel_tol = 1e-7;
    double abs_tol = 1e-7;
    int max_iters = 200;
    double damping = 1e-4;
};

struct EvaluateOptions {
    std::string result;
    std::string data;
    std::string truth;  // optional sidecar
    std::string output;
    std::string plot_data;  // optional per-sample error CSV
    std::optional<double> declination_deg;
};

struct MonteCarloOptions {
    std::vector<std::string> kinds = {"WAM", "MAM", "LAM"};
    std::vector<std::string> methods = {"magyc-bfg", "magyc-ifg", "ellipsoid"};
    int runs = 1;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int workers = 0;  // 0: MAGYC_WORKERS env or hardware concurrency
};

int cmd_simulate(const SimulateOptions& opt);
int cmd_calibrate(const CalibrateOptions& opt);
int cmd_evaluate(const EvaluateOptions& opt);
int cmd_montecarlo(const MonteCarloOptions& opt);

}  // namespace magyc::cli
