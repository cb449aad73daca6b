#include "commands.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <json.hpp>

#include "magyc/ellipsoid_fit.hpp"
#include "magyc/eval.hpp"
#include "magyc/io.hpp"
#include "magyc/preprocess.hpp"
#include "magyc/sim.hpp"
#include "magyc/solver.hpp"

namespace magyc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string run_tag(int run) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "run%03d", run);
    return buf;
}

PreprocessConfig make_preprocess_config(const Dataset& ds, int window, const std::string& scheme) {
    PreprocessConfig cfg;
    cfg.window = window > 0 ? window : default_window_for(ds.samples);
    if (scheme == "central") {
        cfg.scheme = DerivativeScheme::Central;
    } else if (scheme == "forward") {
        cfg.scheme = DerivativeScheme::Forward;
    } else {
        throw input_error("bad-scheme", "unknown derivative scheme: " + scheme);
    }
    return cfg;
}

struct MethodConfig {
    PreprocessConfig preprocess;
    NoiseModel noise;
    SolverConfig solver;
};

CalibrationResult run_method(const std::string& method, const Dataset& ds,
                             const MethodConfig& cfg) {
    if (method == "magyc-bfg") {
        const auto processed = preprocess(ds.samples, cfg.preprocess);
        const FactorGraph graph = build_graph(processed, cfg.noise, cfg.solver);
        return optimize_batch(graph, cfg.solver);
    }
    if (method == "magyc-ifg") {
        const auto processed = preprocess(ds.samples, cfg.preprocess);
        return optimize_incremental(processed, cfg.noise, cfg.solver);
    }
    if (method == "ellipsoid") {
        std::vector<Vec3> mags;
        mags.reserve(ds.samples.size());
        for (const MeasurementSample& s : ds.samples) mags.push_back(s.m);
        const EllipsoidFitResult fit = ellipsoid_fit(mags);
        CalibrationResult r;
        r.soft_iron = fit.soft_iron;
        r.hard_iron = fit.hard_iron;
        r.gyro_bias = Vec3::Zero();
        r.state = fit.to_state();
        r.final_cost = fit.algebraic_residual;
        r.converged = true;
        return r;
    }
    throw input_error("bad-method", "unknown calibration method: " + method);
}

int worker_count(int requested, std::size_t jobs) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("MAGYC_WORKERS")) {
            n = std::atoi(env);
        }
    }
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
    }
    n = std::max(1, n);
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), jobs));
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt) {
    const MotionKind kind = motion_kind_from_string(opt.kind);
    const SimulationTruth truth = SimulationTruth::reference();
    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);

    const MotionKind kinds[] = {kind};
    const auto runs = monte_carlo(kinds, truth, opt.runs, opt.seed);
    for (int r = 0; r < opt.runs; ++r) {
        const std::string tag = run_tag(r);
        const Dataset& cal = runs[static_cast<std::size_t>(r)].calibration.at(kind);
        const Dataset& eval_ds = runs[static_cast<std::size_t>(r)].evaluation;
        write_dataset_csv(cal, out_dir / (to_string(kind) + "_" + tag + ".csv"));
        write_dataset_csv(eval_ds, out_dir / ("eval_" + tag + ".csv"));
        write_truth_json(truth, out_dir / ("truth_" + tag + ".json"));
    }
    std::cout << "wrote " << opt.runs << " run(s) to " << out_dir.string() << "\n";
    return 0;
}

int cmd_calibrate(const CalibrateOptions& opt) {
    const Dataset ds = read_dataset_csv(opt.input);

    MethodConfig cfg;
    cfg.preprocess = make_preprocess_config(ds, opt.window, opt.scheme);
    cfg.noise.sigma_residual = opt.sigma_residual * Mat3::Identity();
    cfg.noise.sigma_norm = opt.sigma_norm;
    cfg.solver.rel_tol = opt.rel_tol;
    cfg.solver.abs_tol = opt.abs_tol;
    cfg.solver.max_iters = opt.max_iters;
    cfg.solver.initial_damping = opt.damping;
    cfg.solver.norm_target = opt.norm_target;

    ResultDocument doc;
    doc.method = opt.method;
    doc.result = run_method(opt.method, ds, cfg);
    write_result_json(doc, opt.output);

    if (!doc.result.converged) {
        std::cerr << json{{"error", {{"kind", "not-converged"},
                                     {"message", "optimizer hit the iteration cap"}}}}
                         .dump()
                  << "\n";
        return 4;
    }
    std::cout << "calibration written to " << opt.output << "\n";
    return 0;
}

int cmd_evaluate(const EvaluateOptions& opt) {
    const ResultDocument doc = read_result_json(opt.result);
    Dataset ds = read_dataset_csv(opt.data);
    if (!opt.truth.empty()) {
        ds.truth = read_truth_json(opt.truth);
    }
    std::optional<double> declination;
    if (opt.declination_deg) {
        declination = deg_to_rad(*opt.declination_deg);
    }

    const EvaluationReport report = evaluate(ds, doc.result.state, doc.method, declination);
    write_report_json(report, opt.output);

    if (!opt.plot_data.empty()) {
        const std::vector<double> errors = heading_errors_deg(ds, doc.result.state, declination);
        std::vector<double> times;
        times.reserve(ds.samples.size());
        for (const MeasurementSample& s : ds.samples) times.push_back(s.t);
        write_heading_errors_csv(times, errors, opt.plot_data);
    }
    std::cout << "report written to " << opt.output << "\n";
    return 0;
}

int cmd_montecarlo(const MonteCarloOptions& opt) {
    std::vector<MotionKind> kinds;
    kinds.reserve(opt.kinds.size());
    for (const std::string& k : opt.kinds) kinds.push_back(motion_kind_from_string(k));
    for (const std::string& m : opt.methods) {
        if (m != "magyc-bfg" && m != "magyc-ifg" && m != "ellipsoid") {
            throw input_error("bad-method", "unknown calibration method: " + m);
        }
    }

    const SimulationTruth truth = SimulationTruth::reference();
    const auto runs = monte_carlo(kinds, truth, opt.runs, opt.seed);

    struct Job {
        int run;
        MotionKind kind;
        std::string method;
    };
    std::vector<Job> jobs;
    for (int r = 0; r < opt.runs; ++r) {
        for (const MotionKind kind : kinds) {
            for (const std::string& method : opt.methods) {
                jobs.push_back({r, kind, method});
            }
        }
    }

    struct JobResult {
        bool ok = false;
        std::string error_kind;
        double heading_rmse_deg = 0.0;
        double mag_field_std_mg = 0.0;
    };
    std::vector<JobResult> results(jobs.size());

    MethodConfig cfg;  // defaults throughout the sweep
    auto run_job = [&](const Job& job) {
        JobResult jr;
        try {
            const Dataset& cal = runs[static_cast<std::size_t>(job.run)].calibration.at(job.kind);
            const Dataset& eval_ds = runs[static_cast<std::size_t>(job.run)].evaluation;
            MethodConfig local = cfg;
            local.preprocess.window = default_window_for(cal.samples);
            const CalibrationResult r = run_method(job.method, cal, local);
            jr.heading_rmse_deg = heading_rmse(eval_ds, r.state);
            jr.mag_field_std_mg = mag_field_std(eval_ds, r.state);
            jr.ok = true;
        } catch (const Error& e) {
            jr.error_kind = e.kind();
        }
        return jr;
    };

    const int workers = worker_count(opt.workers, jobs.size());
    std::atomic<std::size_t> next{0};
    auto drain = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            results[i] = run_job(jobs[i]);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (std::thread& t : pool) t.join();

    // Raw (uncalibrated) baseline on each evaluation dataset.
    double raw_rmse = 0.0, raw_std = 0.0;
    for (int r = 0; r < opt.runs; ++r) {
        const Dataset& eval_ds = runs[static_cast<std::size_t>(r)].evaluation;
        raw_rmse += heading_rmse(eval_ds, CalibrationState::identity());
        raw_std += mag_field_std(eval_ds, CalibrationState::identity());
    }
    raw_rmse /= opt.runs;
    raw_std /= opt.runs;

    struct Cell {
        int successes = 0;
        int failures = 0;
        double rmse_sum = 0.0;
        double std_sum = 0.0;
    };
    std::map<std::pair<std::string, std::string>, Cell> cells;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        Cell& cell = cells[{to_string(jobs[i].kind), jobs[i].method}];
        if (results[i].ok) {
            ++cell.successes;
            cell.rmse_sum += results[i].heading_rmse_deg;
            cell.std_sum += results[i].mag_field_std_mg;
        } else {
            ++cell.failures;
        }
    }

    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);

    json summary{{"schema", kSummarySchema},
                 {"runs", opt.runs},
                 {"seed", opt.seed},
                 {"raw", {{"heading_rmse_deg", raw_rmse}, {"mag_field_std_mg", raw_std}}}};
    json table = json::array();

    std::printf("%-8s %-12s %18s %18s %s\n", "dataset", "method", "heading RMSE (deg)",
                "field std (mG)", "runs ok");
    std::printf("%-8s %-12s %18.3f %18.3f %7d\n", "-", "raw", raw_rmse, raw_std, opt.runs);
    for (const auto& [key, cell] : cells) {
        json row{{"dataset", key.first}, {"method", key.second},
                 {"successes", cell.successes}, {"failures", cell.failures}};
        if (cell.successes > 0) {
            const double rmse = cell.rmse_sum / cell.successes;
            const double std_mg = cell.std_sum / cell.successes;
            row["heading_rmse_deg"] = rmse;
            row["mag_field_std_mg"] = std_mg;
            std::printf("%-8s %-12s %18.3f %18.3f %4d/%d\n", key.first.c_str(),
                        key.second.c_str(), rmse, std_mg, cell.successes,
                        cell.successes + cell.failures);
        } else {
            std::printf("%-8s %-12s %18s %18s %4d/%d\n", key.first.c_str(), key.second.c_str(),
                        "N/A", "N/A", 0, cell.failures);
        }
        table.push_back(std::move(row));
    }
    summary["cells"] = std::move(table);

    const fs::path summary_path = out_dir / "summary.json";
    std::ofstream out(summary_path);
    if (!out) {
        throw input_error("io-error", "cannot write " + summary_path.string());
    }
    out << summary.dump(2) << '\n';
    std::cout << "summary written to " << summary_path.string() << "\n";
    return 0;
}

}  // namespace magyc::cli
