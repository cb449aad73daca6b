#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "magyc/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"magnetometer + gyroscope calibration toolkit"};
    app.require_subcommand(1);

    magyc::cli::SimulateOptions sim_opt;
    CLI::App* sim = app.add_subcommand("simulate", "generate simulated calibration datasets");
    sim->add_option("--kind", sim_opt.kind, "dataset family: WAM, MAM or LAM")
        ->default_val("WAM");
    sim->add_option("--runs", sim_opt.runs, "number of runs")->default_val(1);
    sim->add_option("--seed", sim_opt.seed, "master seed")->default_val(0);
    sim->add_option("--out", sim_opt.out_dir, "output directory")->required();

    magyc::cli::CalibrateOptions cal_opt;
    CLI::App* cal = app.add_subcommand("calibrate", "estimate calibration parameters from a CSV log");
    cal->add_option("--method", cal_opt.method, "magyc-bfg, magyc-ifg or ellipsoid")
        ->default_val("magyc-bfg");
    cal->add_option("--input", cal_opt.input, "measurement CSV")->required();
    cal->add_option("--output", cal_opt.output, "result JSON path")->required();
    cal->add_option("--window", cal_opt.window,
                    "averaging window in samples (default: nominal rate in Hz)");
    cal->add_option("--scheme", cal_opt.scheme, "derivative scheme: central or forward")
        ->default_val("central");
    cal->add_option("--sigma-residual", cal_opt.sigma_residual,
                    "residual factor covariance (isotropic)")->default_val(0.001);
    cal->add_option("--sigma-norm", cal_opt.sigma_norm, "norm factor covariance")
        ->default_val(0.01);
    cal->add_option("--norm-target", cal_opt.norm_target, "soft-iron norm target")
        ->default_val(1.0);
    cal->add_option("--rel-tol", cal_opt.rel_tol, "relative error tolerance")->default_val(1e-7);
    cal->add_option("--abs-tol", cal_opt.abs_tol, "absolute error tolerance")->default_val(1e-7);
    cal->add_option("--max-iters", cal_opt.max_iters, "iteration cap")->default_val(200);
    cal->add_option("--damping", cal_opt.damping, "initial damping")->default_val(1e-4);

    magyc::cli::EvaluateOptions eval_opt;
    CLI::App* ev = app.add_subcommand("evaluate", "score a calibration result on a dataset");
    ev->add_option("--result", eval_opt.result, "calibration result JSON")->required();
    ev->add_option("--data", eval_opt.data, "evaluation CSV with attitude columns")->required();
    ev->add_option("--truth", eval_opt.truth, "simulation truth sidecar JSON");
    ev->add_option("--output", eval_opt.output, "report JSON path")->required();
    ev->add_option("--plot-data", eval_opt.plot_data, "per-sample heading error CSV");
    double declination_deg = 0.0;
    CLI::Option* decl_flag =
        ev->add_option("--declination", declination_deg, "local declination in degrees");

    magyc::cli::MonteCarloOptions mc_opt;
    CLI::App* mc = app.add_subcommand("montecarlo", "calibration sweep over simulated datasets");
    mc->add_option("--kinds", mc_opt.kinds, "dataset families")->delimiter(',');
    mc->add_option("--methods", mc_opt.methods, "calibration methods")->delimiter(',');
    mc->add_option("--runs", mc_opt.runs, "number of runs")->default_val(1);
    mc->add_option("--seed", mc_opt.seed, "master seed")->default_val(0);
    mc->add_option("--out", mc_opt.out_dir, "output directory")->required();
    mc->add_option("--workers", mc_opt.workers,
                   "worker threads (default: MAGYC_WORKERS or hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (sim->parsed()) return magyc::cli::cmd_simulate(sim_opt);
        if (cal->parsed()) return magyc::cli::cmd_calibrate(cal_opt);
        if (ev->parsed()) {
            if (decl_flag->count() > 0) eval_opt.declination_deg = declination_deg;
            return magyc::cli::cmd_evaluate(eval_opt);
        }
        if (mc->parsed()) return magyc::cli::cmd_montecarlo(mc_opt);
    } catch (const magyc::Error& e) {
        std::cerr << nlohmann::json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump()
                  << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 1;
    }
    return 0;
}
