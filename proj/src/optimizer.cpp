#include "bbfgs/optimizer.hpp"

#include <chrono>
#include <cmath>

#include "bbfgs/dataset.hpp"

namespace bbfgs {

namespace {

constexpr std::uint64_t kStreamS = 1;
constexpr std::uint64_t kStreamT = 2;
constexpr std::uint64_t kStreamSketch = 3;
constexpr std::uint64_t kStreamPick = 4;

std::size_t resolve_sample_size(std::size_t configured, std::size_t n) {
    if (configured != 0) return std::min(configured, n);
    return std::min<std::size_t>(n, std::size_t(std::ceil(std::sqrt(double(n)))));
}

}  // namespace

OptimizerConfig OptimizerConfig::option_i(SketchStrategy strategy) {
    OptimizerConfig cfg;
    cfg.strategy = strategy;
    cfg.metric_mode = MetricMode::Dense;
    cfg.outer_option = OuterOption::LastIterate;
    return cfg;
}

OptimizerConfig OptimizerConfig::option_ii(SketchStrategy strategy) {
    OptimizerConfig cfg;
    cfg.strategy = strategy;
    cfg.metric_mode = std::holds_alternative<SelfConditioningSketch>(strategy)
                          ? MetricMode::Factored
                          : MetricMode::LimitedMemory;
    cfg.outer_option = OuterOption::RandomIterate;
    return cfg;
}

Vector vr_gradient(const Objective& model, const Vector& x, const Vector& x0, const Vector& mu,
                   const IndexSample& sample) {
    Vector g = model.subsampled_gradient(x, sample);
    Vector g0 = model.subsampled_gradient(x0, sample);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += mu[i] - g0[i];
    return g;
}

OptimizerRun::OptimizerRun(const Objective& model, const OptimizerConfig& config, Vector w0)
    : model_(model),
      config_(config),
      m_(config.m),
      s_size_(resolve_sample_size(config.s_size, model.num_examples())),
      t_size_(resolve_sample_size(config.t_size, model.num_examples())),
      w_(std::move(w0)),
      buffer_(config.memory, config.metric_mode == MetricMode::Factored),
      s_stream_(Rng(config.seed).child(kStreamS)),
      t_stream_(Rng(config.seed).child(kStreamT)),
      sketch_stream_(Rng(config.seed).child(kStreamSketch)),
      pick_stream_(Rng(config.seed).child(kStreamPick)) {
    if (w_.size() != model.dim()) throw DimensionMismatch("w0 length does not match dimension");
    if (m_ == 0) m_ = std::max<std::size_t>(1, model.num_examples() / s_size_);
    if (config_.metric_mode == MetricMode::Dense) {
        if (model.dim() > 2000) {
            throw TooLarge("dense metric mode guarded to d <= 2000");
        }
        dense_h_ = Matrix::identity(model.dim());
    }
    if (config_.metric_mode == MetricMode::Factored &&
        !std::holds_alternative<SelfConditioningSketch>(config_.strategy)) {
        throw std::invalid_argument("factored metric mode requires the self-conditioning sketch");
    }
    if (auto* prev = std::get_if<PrevDirectionsSketch>(&config_.strategy)) {
        window_.emplace(prev->window);
    }
    mu_ = Vector(model.dim(), 0.0);
    x_ = w_;
}

bool OptimizerRun::iterate_finite() const {
    for (double v : x_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void OptimizerRun::begin_outer() {
    mu_ = model_.full_gradient(w_);
    datapasses_ += 1.0;
    x_ = w_;
    t_ = 0;
    picked_w_ = w_;
    pick_ = config_.outer_option == OuterOption::RandomIterate
                ? 1 + pick_stream_.uniform_below(m_)
                : m_;
}

void OptimizerRun::end_outer() {
    w_ = picked_w_;
    ++k_;
}

void OptimizerRun::push_triple(BlockTriple triple) {
    if (config_.metric_mode == MetricMode::Dense) {
        dense_h_ = dense_update(dense_h_, triple);
    } else {
        buffer_.push(std::move(triple));
    }
}

void OptimizerRun::update_metric_gaussian() {
    const auto& gauss = std::get<GaussianSketch>(config_.strategy);
    const std::size_t n = model_.num_examples();
    for (int attempt = 0; attempt < 4; ++attempt) {
        Matrix d = gaussian_sketch(sketch_stream_, model_.dim(), gauss.q);
        IndexSample t_sample = sample_indices(t_stream_, n, t_size_);
        Matrix y = model_.hessian_action(x_, t_sample, d);
        datapasses_ += double(t_size_) / double(n);
        try {
            push_triple(make_triple(std::move(d), std::move(y)));
            return;
        } catch (const RankDeficient&) {
            // redraw, then give up and keep the previous metric
        }
    }
    ++metric_skips_;
}

void OptimizerRun::update_metric_self_conditioning() {
    const auto& fact = std::get<SelfConditioningSketch>(config_.strategy);
    const std::size_t n = model_.num_examples();
    for (int attempt = 0; attempt < 2; ++attempt) {
        SelfConditioningResult sketch =
            self_conditioning_sketch(sketch_stream_, buffer_, model_.dim(), fact.q);
        IndexSample t_sample = sample_indices(t_stream_, n, t_size_);
        Matrix y = model_.hessian_action(x_, t_sample, sketch.d);
        datapasses_ += double(t_size_) / double(n);
        try {
            push_triple(make_triple(std::move(sketch.d), std::move(y), std::move(sketch.columns)));
            return;
        } catch (const RankDeficient&) {
            // resample C once, then skip
        }
    }
    ++metric_skips_;
}

void OptimizerRun::handle_direction_window(const Vector& direction) {
    bool zero = true;
    for (double v : direction) {
        if (v != 0.0) {
            zero = false;
            break;
        }
    }
    if (zero) return;  // stationary step contributes no rank
    std::optional<Matrix> emitted = window_->push(direction);
    if (!emitted) return;
    const std::size_t n = model_.num_examples();
    IndexSample t_sample = sample_indices(t_stream_, n, t_size_);
    Matrix y = model_.hessian_action(x_, t_sample, *emitted);
    datapasses_ += double(t_size_) / double(n);
    // Rank repair: drop oldest columns until the gram factorizes. Y = G D
    // columnwise, so dropped columns of D drop the same columns of Y.
    Matrix d = std::move(*emitted);
    while (d.cols() >= 1) {
        try {
            push_triple(make_triple(d, y));
            return;
        } catch (const RankDeficient&) {
            if (d.cols() == 1) break;
            Matrix d2(d.rows(), d.cols() - 1);
            Matrix y2(y.rows(), y.cols() - 1);
            for (std::size_t i = 0; i < d.rows(); ++i) {
                for (std::size_t j = 1; j < d.cols(); ++j) {
                    d2(i, j - 1) = d(i, j);
                    y2(i, j - 1) = y(i, j);
                }
            }
            d = std::move(d2);
            y = std::move(y2);
        }
    }
    ++metric_skips_;
}

Vector OptimizerRun::apply_metric(const Vector& g) const {
    switch (config_.metric_mode) {
        case MetricMode::Identity:
            return g;
        case MetricMode::Dense:
            return matvec(dense_h_, g);
        case MetricMode::LimitedMemory:
            return two_loop_apply(buffer_, g);
        case MetricMode::Factored:
            return factored_apply(buffer_, factored_transpose_apply(buffer_, g));
    }
    return g;
}

void OptimizerRun::inner_step() {
    const std::size_t n = model_.num_examples();
    IndexSample s_sample = sample_indices(s_stream_, n, s_size_);
    Vector g = vr_gradient(model_, x_, w_, mu_, s_sample);
    datapasses_ += double(s_size_) / double(n);

    if (config_.metric_mode != MetricMode::Identity) {
        if (std::holds_alternative<GaussianSketch>(config_.strategy)) {
            update_metric_gaussian();
        } else if (std::holds_alternative<SelfConditioningSketch>(config_.strategy)) {
            update_metric_self_conditioning();
        }
        // PrevDirections refreshes after the direction is known, below.
    }

    Vector direction = apply_metric(g);
    for (double& v : direction) v = -v;

    if (window_ && config_.metric_mode != MetricMode::Identity) {
        handle_direction_window(direction);
    }

    for (std::size_t i = 0; i < x_.size(); ++i) x_[i] += config_.eta * direction[i];
    ++t_;
    if (t_ == pick_) picked_w_ = x_;
}

RunTrace OptimizerRun::run() {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    RunTrace trace;
    trace.records.push_back({datapasses_, elapsed(), model_.value(w_)});
    for (std::size_t k = 0; k < config_.max_outer; ++k) {
        begin_outer();
        for (std::size_t t = 0; t < m_; ++t) {
            inner_step();
            if (!iterate_finite()) {
                trace.diverged = true;
                trace.metric_skips = metric_skips_;
                trace.final_w = w_;
                return trace;
            }
        }
        end_outer();
        trace.records.push_back({datapasses_, elapsed(), model_.value(w_)});
        if (datapasses_ >= config_.max_datapasses) break;
    }
    trace.final_w = w_;
    trace.metric_skips = metric_skips_;
    return trace;
}

RunTrace run(const Objective& model, const OptimizerConfig& config, const Vector& w0) {
    OptimizerRun r(model, config, w0);
    return r.run();
}

RunTrace run(const Objective& model, const OptimizerConfig& config) {
    return run(model, config, Vector(model.dim(), 0.0));
}

RunTrace svrg_baseline(const Objective& model, OptimizerConfig config, const Vector& w0) {
    config.strategy = IdentityMetric{};
    config.metric_mode = MetricMode::Identity;
    return run(model, config, w0);
}

}  // namespace bbfgs
