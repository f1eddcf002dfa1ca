#include "gafill/mlp.hpp"

#include <cmath>
#include <limits>

#include "gafill/errors.hpp"
#include "gafill/rng.hpp"

namespace gafill {

namespace {

void check_shapes(const MlpModel& model, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets) {
    if (inputs.cols() != model.input_count())
        throw DataError("input width " + std::to_string(inputs.cols()) +
                        " does not match network input count " +
                        std::to_string(model.input_count()));
    if (targets.cols() != model.output_count())
        throw DataError("target width " + std::to_string(targets.cols()) +
                        " does not match network output count " +
                        std::to_string(model.output_count()));
    if (inputs.rows() != targets.rows())
        throw DataError("input and target row counts differ");
}

Eigen::Index weight_count(const MlpModel& m) {
    return m.w1.size() + m.b1.size() + m.w2.size() + m.b2.size();
}

// Flat layout: w1 row-major, b1, w2 row-major, b2.
Eigen::VectorXd pack(const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1,
                     const Eigen::MatrixXd& w2, const Eigen::VectorXd& b2) {
    Eigen::VectorXd v(w1.size() + b1.size() + w2.size() + b2.size());
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < w1.rows(); ++i)
        for (Eigen::Index j = 0; j < w1.cols(); ++j) v(at++) = w1(i, j);
    for (Eigen::Index i = 0; i < b1.size(); ++i) v(at++) = b1(i);
    for (Eigen::Index i = 0; i < w2.rows(); ++i)
        for (Eigen::Index j = 0; j < w2.cols(); ++j) v(at++) = w2(i, j);
    for (Eigen::Index i = 0; i < b2.size(); ++i) v(at++) = b2(i);
    return v;
}

void unpack(const Eigen::VectorXd& v, MlpModel& m) {
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < m.w1.rows(); ++i)
        for (Eigen::Index j = 0; j < m.w1.cols(); ++j) m.w1(i, j) = v(at++);
    for (Eigen::Index i = 0; i < m.b1.size(); ++i) m.b1(i) = v(at++);
    for (Eigen::Index i = 0; i < m.w2.rows(); ++i)
        for (Eigen::Index j = 0; j < m.w2.cols(); ++j) m.w2(i, j) = v(at++);
    for (Eigen::Index i = 0; i < m.b2.size(); ++i) m.b2(i) = v(at++);
}

} // namespace

MlpModel make_mlp(int input_count, int hidden_count, int output_count,
                  std::uint64_t seed, double weight_init_scale) {
    if (input_count < 1 || hidden_count < 1 || output_count < 1)
        throw ConfigError("network dimensions must be at least 1");
    MlpModel m;
    m.w1.resize(hidden_count, input_count);
    m.b1.resize(hidden_count);
    m.w2.resize(output_count, hidden_count);
    m.b2.resize(output_count);

    Rng rng(seed);
    double s1 = weight_init_scale > 0 ? weight_init_scale
                                      : 1.0 / std::sqrt(static_cast<double>(input_count));
    double s2 = weight_init_scale > 0 ? weight_init_scale
                                      : 1.0 / std::sqrt(static_cast<double>(hidden_count));
    // Fixed draw order (w1 row-major, b1, w2 row-major, b2) keeps
    // initialization reproducible.
    for (Eigen::Index i = 0; i < m.w1.rows(); ++i)
        for (Eigen::Index j = 0; j < m.w1.cols(); ++j)
            m.w1(i, j) = rng.uniform(-s1, s1);
    for (Eigen::Index i = 0; i < m.b1.size(); ++i) m.b1(i) = rng.uniform(-s1, s1);
    for (Eigen::Index i = 0; i < m.w2.rows(); ++i)
        for (Eigen::Index j = 0; j < m.w2.cols(); ++j)
            m.w2(i, j) = rng.uniform(-s2, s2);
    for (Eigen::Index i = 0; i < m.b2.size(); ++i) m.b2(i) = rng.uniform(-s2, s2);
    return m;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.input_count())
        throw DataError("input length " + std::to_string(x.size()) +
                        " does not match network input count " +
                        std::to_string(model.input_count()));
    Eigen::VectorXd hidden = ((model.w1 * x) + model.b1).array().tanh();
    return model.w2 * hidden + model.b2;
}

Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
    if (inputs.cols() != model.input_count())
        throw DataError("input width does not match network input count");
    Eigen::MatrixXd hidden =
        ((inputs * model.w1.transpose()).rowwise() + model.b1.transpose())
            .array()
            .tanh();
    return (hidden * model.w2.transpose()).rowwise() + model.b2.transpose();
}

double loss(const MlpModel& model, const Eigen::MatrixXd& inputs,
            const Eigen::MatrixXd& targets) {
    check_shapes(model, inputs, targets);
    return 0.5 * (forward_batch(model, inputs) - targets).squaredNorm();
}

MlpGradient gradient(const MlpModel& model, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets) {
    check_shapes(model, inputs, targets);
    Eigen::MatrixXd hidden =
        ((inputs * model.w1.transpose()).rowwise() + model.b1.transpose())
            .array()
            .tanh();
    Eigen::MatrixXd outputs =
        (hidden * model.w2.transpose()).rowwise() + model.b2.transpose();

    Eigen::MatrixXd residual = outputs - targets;              // n x K
    Eigen::MatrixXd d_hidden = residual * model.w2;            // n x M
    Eigen::MatrixXd d_pre =
        d_hidden.array() * (1.0 - hidden.array().square());    // tanh'

    MlpGradient g;
    g.w2 = residual.transpose() * hidden;
    g.b2 = residual.colwise().sum();
    g.w1 = d_pre.transpose() * inputs;
    g.b1 = d_pre.colwise().sum();
    return g;
}

TrainResult train_scg(MlpModel model, const Eigen::MatrixXd& train_inputs,
                      const Eigen::MatrixXd& train_targets,
                      const Eigen::MatrixXd& val_inputs,
                      const Eigen::MatrixXd& val_targets,
                      const TrainConfig& config) {
    check_shapes(model, train_inputs, train_targets);
    check_shapes(model, val_inputs, val_targets);
    if (train_inputs.rows() == 0 || val_inputs.rows() == 0)
        throw DataError("training and validation batches must be nonempty");
    if (config.max_cycles < 1 || config.patience < 1)
        throw ConfigError("max_cycles and patience must be at least 1");

    const Eigen::Index n = weight_count(model);
    MlpModel scratch = model;

    auto eval_loss = [&](const Eigen::VectorXd& w) {
        unpack(w, scratch);
        return loss(scratch, train_inputs, train_targets);
    };
    auto eval_grad = [&](const Eigen::VectorXd& w) {
        unpack(w, scratch);
        MlpGradient g = gradient(scratch, train_inputs, train_targets);
        return pack(g.w1, g.b1, g.w2, g.b2);
    };
    auto val_loss_at = [&](const Eigen::VectorXd& w) {
        unpack(w, scratch);
        return loss(scratch, val_inputs, val_targets);
    };

    const double sigma = 1e-4;
    double lambda = 1e-6;
    double lambda_bar = 0.0;

    Eigen::VectorXd w = pack(model.w1, model.b1, model.w2, model.b2);
    double train_err = eval_loss(w);
    if (!std::isfinite(train_err))
        throw NumericError("non-finite training loss at cycle 0");

    Eigen::VectorXd r = -eval_grad(w);
    Eigen::VectorXd p = r;
    bool success = true;
    double delta = 0.0;
    double p2 = p.squaredNorm();

    double best_val = val_loss_at(w);
    Eigen::VectorXd best_w = w;
    int stall = 0;

    TrainResult result;
    result.history.reserve(config.max_cycles);

    for (int cycle = 1; cycle <= config.max_cycles; ++cycle) {
        if (success) {
            p2 = p.squaredNorm();
            if (p2 == 0.0) break; // gradient reached zero
            double sigma_k = sigma / std::sqrt(p2);
            Eigen::VectorXd s = (eval_grad(w + sigma_k * p) + r) / sigma_k;
            delta = p.dot(s);
        }

        delta += (lambda - lambda_bar) * p2;
        if (delta <= 0.0) { // make the Hessian estimate positive definite
            lambda_bar = 2.0 * (lambda - delta / p2);
            delta = -delta + lambda * p2;
            lambda = lambda_bar;
        }

        double mu = p.dot(r);
        double alpha = mu / delta;
        double trial_err = eval_loss(w + alpha * p);
        double comparison = 2.0 * delta * (train_err - trial_err) / (mu * mu);

        if (std::isfinite(trial_err) && comparison >= 0.0) {
            w += alpha * p;
            train_err = trial_err;
            Eigen::VectorXd r_new = -eval_grad(w);
            lambda_bar = 0.0;
            success = true;
            if (cycle % n == 0) {
                p = r_new; // periodic restart along steepest descent
            } else {
                double beta = (r_new.squaredNorm() - r_new.dot(r)) / mu;
                p = r_new + beta * p;
            }
            r = r_new;
            if (comparison >= 0.75) lambda *= 0.25;
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if (!std::isfinite(comparison) || comparison < 0.25)
            lambda += delta * (1.0 - comparison) / p2;
        if (!std::isfinite(lambda) || lambda > 1e250) lambda = 1e250;

        if (!std::isfinite(train_err))
            throw NumericError("non-finite training loss at cycle " +
                               std::to_string(cycle));

        double val_err = val_loss_at(w);
        result.history.push_back({train_err, val_err});

        if (val_err < best_val) {
            best_val = val_err;
            best_w = w;
            stall = 0;
        } else if (++stall >= config.patience) {
            break;
        }
        if (r.squaredNorm() == 0.0) break;
    }

    unpack(best_w, model);
    result.model = std::move(model);
    return result;
}

HiddenSearchResult select_hidden_count(const std::vector<int>& candidates,
                                       const Eigen::MatrixXd& train_inputs,
                                       const Eigen::MatrixXd& train_targets,
                                       const Eigen::MatrixXd& val_inputs,
                                       const Eigen::MatrixXd& val_targets,
                                       const TrainConfig& config, int repeats) {
    if (candidates.empty())
        throw ConfigError("hidden-count search needs at least one candidate");
    if (repeats < 1)
        throw ConfigError("repeats must be at least 1");
    for (int c : candidates)
        if (c < 1)
            throw ConfigError("hidden counts must be at least 1");

    const int d = static_cast<int>(train_inputs.cols());
    const int k = static_cast<int>(train_targets.cols());

    HiddenSearchResult result;
    result.best = candidates.front();
    double best_err = std::numeric_limits<double>::infinity();
    for (int c : candidates) {
        double sum = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            TrainConfig run = config;
            run.seed = Rng::mix(config.seed,
                                static_cast<std::uint64_t>(c) * 1000 + rep);
            MlpModel init = make_mlp(d, c, k, run.seed, config.weight_init_scale);
            TrainResult trained = train_scg(std::move(init), train_inputs,
                                            train_targets, val_inputs,
                                            val_targets, run);
            sum += loss(trained.model, val_inputs, val_targets);
        }
        double mean_err = sum / repeats;
        result.table.emplace_back(c, mean_err);
        bool better = mean_err + 1e-12 < best_err;
        bool tie_smaller =
            std::abs(mean_err - best_err) <= 1e-12 && c < result.best;
        if (better || tie_smaller) {
            best_err = mean_err;
            result.best = c;
        }
    }
    return result;
}

} // namespace gafill
