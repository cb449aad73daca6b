#include "magyc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace magyc {

namespace {

constexpr double kMinDamping = 1e-12;
constexpr double kMaxDamping = 1e6;
// Relative pivot floor below which scaled normal equations count as rank
// deficient. Zero-information directions produce exact zero pivots, so
// this threshold only trips on genuine degeneracies.
constexpr double kPivotTol = 1e-14;

Mat3 cholesky_sqrt_information(const Mat3& covariance) {
    Eigen::LLT<Mat3> llt(covariance);
    if (llt.info() != Eigen::Success) {
        throw input_error("bad-noise-model", "residual covariance is not positive definite");
    }
    // Sigma = L L^T, whitening matrix is L^{-1}.
    return Mat3(llt.matrixL()).inverse();
}

struct NormalEquations {
    Mat12 h = Mat12::Zero();
    Vec12 g = Vec12::Zero();
    double cost = 0.0;
};

// Solves (H + damping*s*I) step = -g with s the mean diagonal of H, so the
// damping strength is meaningful against the problem's information scale.
// The additive term bounds steps along low-information directions, which
// keeps underdetermined prefixes of an incremental stream from drifting.
// Returns false on non-finite input.
bool solve_damped(const NormalEquations& eq, double damping, Vec12& step) {
    const double scale =
        std::max(eq.h.trace() / 12.0, std::numeric_limits<double>::min());
    Mat12 m = eq.h;
    m.diagonal().array() += damping * scale;
    Eigen::LDLT<Mat12> ldlt(m);
    if (ldlt.info() != Eigen::Success) return false;
    step = ldlt.solve(-eq.g);
    return step.allFinite();
}

// A direction carrying no information stays singular under diagonal
// scaling of H at any damping, unlike under the additive form. Probing
// with the scaled form at maximum damping therefore detects parameters
// the dataset cannot excite.
bool observable_at_max_damping(const Mat12& h) {
    if (!h.allFinite()) return false;
    Mat12 m = h;
    m.diagonal() += kMaxDamping * h.diagonal();
    Eigen::LDLT<Mat12> ldlt(m);
    if (ldlt.info() != Eigen::Success) return false;
    const Vec12 d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!std::isfinite(dmax) || dmax <= 0.0) return false;
    return d.minCoeff() > dmax * kPivotTol;
}

struct LmOutcome {
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

// The optimized objective is the graph cost plus the weak prior belief
// anchored at the initial estimate. The prior never enters the factor
// graph itself; it lives in the MAP formulation.
struct Objective {
    const FactorGraph& graph;
    Vec12 prior_weights;
    Vec12 anchor;

    double cost(const CalibrationState& x) const {
        const Vec12 d = x.to_vector() - anchor;
        return graph.cost(x) + 0.5 * d.dot(prior_weights.cwiseProduct(d));
    }

    void accumulate(const CalibrationState& x, NormalEquations& eq) const {
        graph.accumulate(x, eq.h, eq.g, eq.cost);
        const Vec12 d = x.to_vector() - anchor;
        eq.h.diagonal() += prior_weights;
        eq.g += prior_weights.cwiseProduct(d);
        eq.cost += 0.5 * d.dot(prior_weights.cwiseProduct(d));
    }
};

// Shared damped Gauss-Newton loop. Damping follows the schedule: x10 on
// rejected steps, /3 on accepted ones, clamped to [1e-12, 1e+6].
LmOutcome lm_minimize(const Objective& objective, CalibrationState& x, double& damping,
                      int max_iters, const SolverConfig& cfg,
                      std::vector<double>* cost_trace = nullptr) {
    NormalEquations eq;
    objective.accumulate(x, eq);
    if (!std::isfinite(eq.cost) || !eq.h.allFinite() || !eq.g.allFinite()) {
        throw numerical_error("numerical-failure", "non-finite cost at the initial state");
    }
    if (cost_trace && cost_trace->empty()) cost_trace->push_back(eq.cost);

    LmOutcome out;
    out.cost = eq.cost;

    while (out.iterations < max_iters) {
        ++out.iterations;

        Vec12 step;
        if (!solve_damped(eq, damping, step)) {
            throw numerical_error("numerical-failure", "normal equations are not finite");
        }

        const CalibrationState trial = CalibrationState::from_vector(x.to_vector() + step);
        const double trial_cost = objective.cost(trial);

        if (std::isfinite(trial_cost) && trial_cost <= eq.cost) {
            const double abs_dec = eq.cost - trial_cost;
            const double rel_dec = abs_dec / std::max(eq.cost, std::numeric_limits<double>::min());
            x = trial;
            objective.accumulate(x, eq);
            if (!std::isfinite(eq.cost)) {
                throw numerical_error("numerical-failure", "non-finite cost after accepted step");
            }
            out.cost = eq.cost;
            if (cost_trace) cost_trace->push_back(eq.cost);
            damping = std::max(damping / 3.0, kMinDamping);
            if (rel_dec < cfg.rel_tol && abs_dec < cfg.abs_tol) {
                out.converged = true;
                break;
            }
        } else {
            if (damping >= kMaxDamping) {
                if (!std::isfinite(trial_cost)) {
                    throw numerical_error("numerical-failure",
                                          "cost is non-finite at maximum damping");
                }
                // No descent possible even with a near-gradient step: the
                // remaining cost change is below any tolerance.
                out.converged = true;
                break;
            }
            damping = std::min(damping * 10.0, kMaxDamping);
        }
    }
    return out;
}

// The residual is odd and the norm factor even under the joint sign flip
// (c, m_b) -> (-c, -m_b), so every optimum has an exact mirror with C
// negated. Both describe the same physical calibration (A m_b is
// invariant); the trace-positive representative is the one whose C can be
// positive definite. Flipping costs nothing, so the iterate is kept in
// that half-space.
CalibrationState canonical_sign(CalibrationState x) {
    if (x.c.to_matrix().trace() < 0.0) {
        x.c.c = -x.c.c;
        x.m_b = -x.m_b;
    }
    return x;
}

// Excitation gate for both modes: rank deficiency that persists at maximum
// damping means the dataset cannot constrain all 12 parameters.
void check_observability(const FactorGraph& graph, const CalibrationState& x) {
    NormalEquations eq;
    graph.accumulate(x, eq.h, eq.g, eq.cost);
    if (!observable_at_max_damping(eq.h)) {
        throw degenerate_error("degenerate-motion",
                               "calibration parameters are unobservable from this dataset; "
                               "insufficient angular excitation");
    }
}

CalibrationResult extract_result(const CalibrationState& x, double cost, bool converged,
                                 int iterations) {
    CalibrationResult r;
    r.state = x;
    r.soft_iron = x.soft_iron();  // throws when the estimate is non-physical
    r.hard_iron = r.soft_iron * x.m_b;
    r.gyro_bias = x.w_b;
    r.final_cost = cost;
    r.converged = converged;
    r.iterations = iterations;
    return r;
}

}  // namespace

void NoiseModel::validate() const {
    if (!is_positive_definite(sigma_residual)) {
        throw input_error("bad-noise-model", "residual covariance must be symmetric positive definite");
    }
    if (!(sigma_norm > 0.0)) {
        throw input_error("bad-noise-model", "norm covariance must be positive");
    }
}

Factor Factor::make_residual(const ProcessedSample& s, const Mat3& sqrt_info) {
    Factor f;
    f.kind_ = Kind::Residual;
    f.sample_ = s;
    f.sqrt_info_mat_ = sqrt_info;
    return f;
}

Factor Factor::make_norm(double sqrt_info, double target) {
    Factor f;
    f.kind_ = Kind::Norm;
    f.sqrt_info_scalar_ = sqrt_info;
    f.target_ = target;
    return f;
}

Eigen::VectorXd Factor::error(const CalibrationState& x) const {
    if (kind_ == Kind::Residual) {
        return sqrt_info_mat_ * residual(x, sample_);
    }
    Eigen::VectorXd e(1);
    e(0) = sqrt_info_scalar_ * norm_error(x, target_);
    return e;
}

Eigen::MatrixXd Factor::jacobian(const CalibrationState& x) const {
    if (kind_ == Kind::Residual) {
        return sqrt_info_mat_ * residual_jacobian(x, sample_);
    }
    return sqrt_info_scalar_ * norm_jacobian(x);
}

FactorGraph::FactorGraph(const NoiseModel& noise, double norm_target)
    : norm_target_(norm_target) {
    noise.validate();
    residual_sqrt_info_ = cholesky_sqrt_information(noise.sigma_residual);
    norm_sqrt_info_ = 1.0 / std::sqrt(noise.sigma_norm);
}

void FactorGraph::add_sample(const ProcessedSample& s) {
    factors_.push_back(Factor::make_residual(s, residual_sqrt_info_));
    factors_.push_back(Factor::make_norm(norm_sqrt_info_, norm_target_));
}

void FactorGraph::drop_last_sample() {
    if (factors_.size() >= 2) {
        factors_.pop_back();
        factors_.pop_back();
    }
}

double FactorGraph::cost(const CalibrationState& x) const {
    return cost_breakdown(x).total();
}

CostBreakdown FactorGraph::cost_breakdown(const CalibrationState& x) const {
    CostBreakdown b;
    for (const Factor& f : factors_) {
        if (f.kind_ == Factor::Kind::Residual) {
            b.residual_cost += 0.5 * (f.sqrt_info_mat_ * residual(x, f.sample_)).squaredNorm();
        } else {
            const double e = f.sqrt_info_scalar_ * norm_error(x, f.target_);
            b.norm_cost += 0.5 * e * e;
        }
    }
    return b;
}

void FactorGraph::accumulate(const CalibrationState& x, Mat12& h, Vec12& g,
                             double& cost) const {
    h.setZero();
    g.setZero();
    cost = 0.0;
    for (const Factor& f : factors_) {
        if (f.kind_ == Factor::Kind::Residual) {
            const Vec3 e = f.sqrt_info_mat_ * residual(x, f.sample_);
            const Jacobian3x12 j = f.sqrt_info_mat_ * residual_jacobian(x, f.sample_);
            h.noalias() += j.transpose() * j;
            g.noalias() += j.transpose() * e;
            cost += 0.5 * e.squaredNorm();
        } else {
            const double e = f.sqrt_info_scalar_ * norm_error(x, f.target_);
            const Jacobian1x12 j = f.sqrt_info_scalar_ * norm_jacobian(x);
            h.noalias() += j.transpose() * j;
            g.noalias() += j.transpose() * e;
            cost += 0.5 * e * e;
        }
    }
}

FactorGraph build_graph(std::span<const ProcessedSample> samples,
                        const NoiseModel& noise, const SolverConfig& cfg) {
    if (samples.empty()) {
        throw input_error("empty-dataset", "cannot build a factor graph from zero samples");
    }
    FactorGraph graph(noise, cfg.norm_target);
    for (const ProcessedSample& s : samples) graph.add_sample(s);
    return graph;
}

double total_cost(const FactorGraph& graph, const CalibrationState& x) {
    return graph.cost(x);
}

CalibrationResult optimize_batch(const FactorGraph& graph, const CalibrationState& x0,
                                 const SolverConfig& cfg) {
    if (graph.size() == 0) {
        throw input_error("empty-dataset", "factor graph has no factors");
    }
    CalibrationState x = x0;
    double damping = cfg.initial_damping;
    std::vector<double> trace;
    const Objective objective{graph, cfg.prior_information(), x0.to_vector()};
    const LmOutcome lm = lm_minimize(objective, x, damping, cfg.max_iters, cfg, &trace);
    x = canonical_sign(x);
    check_observability(graph, x);
    CalibrationResult r = extract_result(x, graph.cost(x), lm.converged, lm.iterations);
    r.cost_trace = std::move(trace);
    return r;
}

CalibrationResult optimize_batch(const FactorGraph& graph, const SolverConfig& cfg) {
    return optimize_batch(graph, CalibrationState::identity(), cfg);
}

CalibrationResult optimize_incremental(std::span<const ProcessedSample> stream,
                                       const NoiseModel& noise, const SolverConfig& cfg,
                                       std::optional<CalibrationState> x0) {
    if (stream.empty()) {
        throw input_error("empty-dataset", "cannot calibrate from an empty stream");
    }
    FactorGraph graph(noise, cfg.norm_target);
    CalibrationState x = x0.value_or(CalibrationState::identity());
    double damping = cfg.initial_damping;
    const Objective objective{graph, cfg.prior_information(), x.to_vector()};

    std::vector<HistoryEntry> history;
    history.reserve(stream.size());
    int total_iterations = 0;

    // Early updates are underdetermined and can strand the warm-started
    // iterate in a poor basin (the norm/residual trade-off admits local
    // minima with a collapsed gauge and garbage shape). A periodic cold
    // probe on the accumulated graph escapes any such basin: the probe is
    // one batch-quality solve, a few ms at full stream length.
    constexpr std::size_t kProbeInterval = 50;

    std::size_t update_index = 0;
    for (const ProcessedSample& s : stream) {
        graph.add_sample(s);
        HistoryEntry entry;
        const CalibrationState before = x;
        // each update starts at least as conservative as a cold start; the
        // warm-started state still converges in one or two steps
        damping = std::max(damping, cfg.initial_damping);
        const double damping_before = damping;
        // the first update is a cold start, not a warm one: give it the
        // batch budget so a single-sample stream matches batch exactly
        const int iter_budget =
            update_index == 0 ? cfg.max_iters : cfg.incremental_iter_cap;
        try {
            const LmOutcome lm = lm_minimize(objective, x, damping, iter_budget, cfg);
            total_iterations += lm.iterations;
            x = canonical_sign(x);
            if (update_index > 0 && (update_index + 1) % kProbeInterval == 0) {
                CalibrationState cold = CalibrationState::from_vector(objective.anchor);
                double cold_damping = cfg.initial_damping;
                const LmOutcome probe =
                    lm_minimize(objective, cold, cold_damping, cfg.max_iters, cfg);
                total_iterations += probe.iterations;
                if (probe.cost < 0.9 * objective.cost(x)) {
                    x = canonical_sign(cold);
                    damping = cold_damping;
                }
            }
        } catch (const Error&) {
            // failed update: restore the previous estimate and withdraw the
            // offending factor pair so it cannot poison later updates
            x = before;
            damping = damping_before;
            graph.drop_last_sample();
            entry.held = true;
        }
        entry.state = x;
        history.push_back(entry);
        ++update_index;
    }

    // Batch/real-time comparisons use the average of the last 20% of the
    // estimated parameters rather than the very last update.
    const std::size_t n = history.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 5);
    Vec12 acc = Vec12::Zero();
    std::size_t held_in_tail = 0;
    for (std::size_t i = n - tail; i < n; ++i) {
        acc += history[i].state.to_vector();
        held_in_tail += history[i].held ? 1 : 0;
    }
    const CalibrationState final_state =
        CalibrationState::from_vector(acc / static_cast<double>(tail));

    check_observability(graph, final_state);

    // converged: the reported average comes entirely from clean updates
    CalibrationResult r = extract_result(final_state, graph.cost(final_state),
                                         held_in_tail == 0, total_iterations);
    r.state_history = std::move(history);
    return r;
}

}  // namespace magyc
