#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "bbfgs/metric.hpp"
#include "bbfgs/objective.hpp"
#include "bbfgs/sketch.hpp"

namespace bbfgs {

enum class MetricMode { Identity, Dense, LimitedMemory, Factored };
enum class OuterOption { LastIterate, RandomIterate };

/// All knobs of the outer/inner loop. Zero-valued sizes resolve to the
/// defaults s = t = ceil(sqrt(n)) and m = floor(n / s) at run start.
struct OptimizerConfig {
    double eta = 0.1;
    std::size_t m = 0;
    std::size_t s_size = 0;
    std::size_t t_size = 0;
    std::size_t memory = 5;
    SketchStrategy strategy = IdentityMetric{};
    MetricMode metric_mode = MetricMode::Identity;
    OuterOption outer_option = OuterOption::RandomIterate;
    std::size_t max_outer = 1;
    double max_datapasses = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;

    /// Dense update with the last inner iterate.
    static OptimizerConfig option_i(SketchStrategy strategy);
    /// Two-loop recursion with a uniformly random inner iterate (the
    /// preset the convergence theory covers).
    static OptimizerConfig option_ii(SketchStrategy strategy);
};

struct TraceRecord {
    double datapasses;
    double seconds;
    double fvalue;
};

struct RunTrace {
    std::vector<TraceRecord> records;
    Vector final_w;
    bool diverged = false;
    std::size_t metric_skips = 0;

    double final_fvalue() const { return records.back().fvalue; }
};

/// g = grad f_S(x) - grad f_S(x0) + mu, with mu the full gradient at x0.
/// Unbiased estimate of grad f(x) over uniform S.
Vector vr_gradient(const Objective& model, const Vector& x, const Vector& x0, const Vector& mu,
                   const IndexSample& sample);

/// Mutable state of one run; exposed so single inner steps can be driven
/// and inspected directly.
class OptimizerRun {
  public:
    OptimizerRun(const Objective& model, const OptimizerConfig& config, Vector w0);

    /// One inner iteration: sample S_t (and T_t when the metric updates),
    /// form the variance-reduced gradient, refresh the metric per the
    /// sketch strategy with rank repair, and take the step.
    void inner_step();

    /// Computes the full gradient at w_k and resets the inner iterate.
    void begin_outer();
    /// Commits w_{k+1} per the outer option.
    void end_outer();

    const Vector& x() const { return x_; }
    const Vector& w() const { return w_; }
    const Vector& mu() const { return mu_; }
    double datapasses() const { return datapasses_; }
    std::size_t inner_count() const { return t_; }
    std::size_t metric_skips() const { return metric_skips_; }
    std::size_t inner_loop_length() const { return m_; }
    const CurvatureBuffer& buffer() const { return buffer_; }
    bool iterate_finite() const;

    /// Full driver: max_outer outer iterations (or until the datapass
    /// budget is hit), recording (datapasses, seconds, f(w_k)) per outer
    /// iteration plus the initial point. A non-finite iterate aborts with
    /// the trace so far flagged as diverged.
    RunTrace run();

  private:
    void update_metric_gaussian();
    void update_metric_self_conditioning();
    void handle_direction_window(const Vector& direction);
    Vector apply_metric(const Vector& g) const;
    void push_triple(BlockTriple triple);

    const Objective& model_;
    OptimizerConfig config_;
    std::size_t m_;
    std::size_t s_size_;
    std::size_t t_size_;

    Vector w_;
    Vector mu_;
    Vector x_;
    Vector picked_w_;
    std::size_t pick_ = 0;
    std::size_t t_ = 0;
    std::size_t k_ = 0;
    double datapasses_ = 0.0;
    std::size_t metric_skips_ = 0;

    CurvatureBuffer buffer_;
    Matrix dense_h_;
    std::optional<DirectionWindow> window_;

    Rng s_stream_;
    Rng t_stream_;
    Rng sketch_stream_;
    Rng pick_stream_;
};

RunTrace run(const Objective& model, const OptimizerConfig& config, const Vector& w0);
RunTrace run(const Objective& model, const OptimizerConfig& config);

/// SVRG with the identity metric; identical accounting.
RunTrace svrg_baseline(const Objective& model, OptimizerConfig config, const Vector& w0);

}  // namespace bbfgs
