#pragma once

#include <optional>
#include <span>
#include <vector>

#include "magyc/model.hpp"
#include "magyc/types.hpp"

// Single-node factor graph over the 12-parameter calibration state and
// its damped Gauss-Newton optimizer, in batch and incremental flavors.
// Every processed sample contributes one whitened residual factor plus
// one soft-iron norm factor, so a fully built graph has 2n factors.
namespace magyc {

struct NoiseModel {
    Mat3 sigma_residual = 0.001 * Mat3::Identity();  // (mG/s)^2
    double sigma_norm = 0.01;

    void validate() const;
};

class Factor {
public:
    enum class Kind { Residual, Norm };

    static Factor make_residual(const ProcessedSample& s, const Mat3& sqrt_info);
    static Factor make_norm(double sqrt_info, double target);

    Kind kind() const { return kind_; }
    int dimension() const { return kind_ == Kind::Residual ? 3 : 1; }

    /// Whitened error vector (dimension 3 or 1).
    Eigen::VectorXd error(const CalibrationState& x) const;
    /// Whitened Jacobian (3x12 or 1x12).
    Eigen::MatrixXd jacobian(const CalibrationState& x) const;

    const ProcessedSample& sample() const { return sample_; }

private:
    Factor() = default;

    Kind kind_ = Kind::Norm;
    ProcessedSample sample_{};
    Mat3 sqrt_info_mat_ = Mat3::Zero();
    double sqrt_info_scalar_ = 0.0;
    double target_ = 1.0;

    friend class FactorGraph;
};

struct CostBreakdown {
    double residual_cost = 0.0;
    double norm_cost = 0.0;
    double total() const { return residual_cost + norm_cost; }
};

class FactorGraph {
public:
    FactorGraph(const NoiseModel& noise, double norm_target);

    void add_sample(const ProcessedSample& s);  // appends one residual + one norm factor
    void drop_last_sample();                    // withdraws the most recent pair

    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t size() const { return factors_.size(); }

    double cost(const CalibrationState& x) const;
    CostBreakdown cost_breakdown(const CalibrationState& x) const;

    /// Gauss-Newton normal equations over all whitened factors:
    /// H = sum J^T J, g = sum J^T e, cost = 0.5 sum |e|^2.
    void accumulate(const CalibrationState& x, Mat12& h, Vec12& g, double& cost) const;

private:
    std::vector<Factor> factors_;
    Mat3 residual_sqrt_info_ = Mat3::Identity();
    double norm_sqrt_info_ = 1.0;
    double norm_target_ = 1.0;
};

struct SolverConfig {
    double rel_tol = 1e-7;
    double abs_tol = 1e-7;
    int max_iters = 200;
    double initial_damping = 1e-4;
    double norm_target = 1.0;
    int incremental_iter_cap = 5;  // damped iterations per incremental update

    // Weak prior belief anchoring the estimate to the initial state. Holds
    // directions the data has not excited yet (critical for the first
    // incremental updates) and is orders of magnitude weaker than any
    // excited direction's information.
    double prior_sigma_c = 1e2;
    double prior_sigma_mb = 1e4;  // mG
    double prior_sigma_wb = 1e1;  // rad/s

    Vec12 prior_information() const {
        Vec12 w;
        w.head<6>().setConstant(1.0 / (prior_sigma_c * prior_sigma_c));
        w.segment<3>(6).setConstant(1.0 / (prior_sigma_mb * prior_sigma_mb));
        w.tail<3>().setConstant(1.0 / (prior_sigma_wb * prior_sigma_wb));
        return w;
    }
};

struct HistoryEntry {
    CalibrationState state;
    bool held = false;  // update failed, previous estimate retained
};

struct CalibrationResult {
    Mat3 soft_iron = Mat3::Identity();  // A
    Vec3 hard_iron = Vec3::Zero();      // A*m_b, mG
    Vec3 gyro_bias = Vec3::Zero();      // rad/s
    CalibrationState state;             // gauge-fixed internal estimate
    std::vector<HistoryEntry> state_history;  // incremental mode only
    std::vector<double> cost_trace;     // accepted-step costs
    double final_cost = 0.0;
    bool converged = false;
    int iterations = 0;
};

FactorGraph build_graph(std::span<const ProcessedSample> samples,
                        const NoiseModel& noise, const SolverConfig& cfg);

double total_cost(const FactorGraph& graph, const CalibrationState& x);

/// Damped Gauss-Newton over the full graph from x0 (default identity
/// calibration). Throws degenerate-motion when the normal equations stay
/// rank deficient at maximum damping, numerical-failure on non-finite cost.
CalibrationResult optimize_batch(const FactorGraph& graph,
                                 const CalibrationState& x0,
                                 const SolverConfig& cfg);
CalibrationResult optimize_batch(const FactorGraph& graph, const SolverConfig& cfg);

/// Adds one factor pair per sample, re-optimizing with warm starts after
/// each update. Reported parameters average the last 20% of the history.
CalibrationResult optimize_incremental(std::span<const ProcessedSample> stream,
                                       const NoiseModel& noise,
                                       const SolverConfig& cfg,
                                       std::optional<CalibrationState> x0 = {});

}  // namespace magyc
