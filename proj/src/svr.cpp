#include "gafill/svr.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <Eigen/Cholesky>

#include "gafill/errors.hpp"

namespace gafill {

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b) {
    if (a.cols() != b.cols())
        throw DataError("kernel operands must have equal widths");
    if (!(kernel.width > 0))
        throw ConfigError("kernel width must be positive");

    // |x-z|^2 = |x|^2 + |z|^2 - 2 x.z, computed blockwise.
    Eigen::VectorXd a2 = a.rowwise().squaredNorm();
    Eigen::VectorXd b2 = b.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = (-2.0 * a * b.transpose()).colwise() + a2;
    d2.rowwise() += b2.transpose();
    double scale = -1.0 / (2.0 * kernel.width * kernel.width);
    return (d2.array().max(0.0) * scale).exp();
}

SvrModel fit_lssvr(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                   double regularization, const KernelSpec& kernel) {
    const Eigen::Index m = inputs.rows();
    if (m == 0)
        throw DataError("regression fit needs at least one row");
    if (targets.size() != m)
        throw DataError("target count does not match input rows");
    if (!(regularization > 0))
        throw ConfigError("regularization must be positive");
    if (!inputs.allFinite() || !targets.allFinite())
        throw NumericError("regression fit received non-finite values");

    Eigen::MatrixXd A = kernel_matrix(kernel, inputs, inputs);
    A.diagonal().array() += 1.0 / regularization;

    // Dual system [[0, 1^T], [1, A]] [b; alpha] = [0; y], eliminated via
    // eta = A^-1 1 and nu = A^-1 y: b = 1.nu / 1.eta, alpha = nu - b eta.
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
    for (;;) {
        Eigen::MatrixXd work = A;
        if (jitter > 0) work.diagonal().array() += jitter;
        llt.compute(work);
        if (llt.info() == Eigen::Success) {
            A = std::move(work);
            break;
        }
        jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0;
        if (jitter > 1e-8)
            throw NumericError(
                "dual system is singular even with diagonal jitter 1e-8; "
                "kernel diagonal spread " +
                std::to_string(A.diagonal().minCoeff()) + ".." +
                std::to_string(A.diagonal().maxCoeff()));
    }

    auto solve_refined = [&](const Eigen::VectorXd& rhs) {
        Eigen::VectorXd x = llt.solve(rhs);
        for (int pass = 0; pass < 3; ++pass) {
            Eigen::VectorXd r = rhs - A * x;
            if (r.lpNorm<Eigen::Infinity>() <= 1e-12) break;
            x += llt.solve(r);
        }
        return x;
    };

    Eigen::VectorXd eta = solve_refined(ones);
    Eigen::VectorXd nu = solve_refined(targets);
    double denom = ones.dot(eta);
    if (denom == 0.0 || !std::isfinite(denom))
        throw NumericError("dual system is degenerate: 1^T A^-1 1 = " +
                           std::to_string(denom));

    SvrModel model;
    model.support_inputs = inputs;
    model.kernel = kernel;
    model.regularization = regularization;
    model.bias = ones.dot(nu) / denom;
    model.alphas = nu - model.bias * eta;

    double eq_residual = std::abs(ones.dot(model.alphas));
    double sys_residual =
        (A * model.alphas + model.bias * ones - targets).lpNorm<Eigen::Infinity>();
    model.system_residual = std::max(eq_residual, sys_residual);
    return model;
}

double predict(const SvrModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.support_inputs.cols())
        throw DataError("input length does not match the model's feature width");
    Eigen::MatrixXd k =
        kernel_matrix(model.kernel, model.support_inputs, x.transpose());
    return k.col(0).dot(model.alphas) + model.bias;
}

Eigen::VectorXd predict_batch(const SvrModel& model, const Eigen::MatrixXd& inputs) {
    if (inputs.cols() != model.support_inputs.cols())
        throw DataError("input width does not match the model's feature width");
    Eigen::MatrixXd k = kernel_matrix(model.kernel, inputs, model.support_inputs);
    return (k * model.alphas).array() + model.bias;
}

TuneResult tune_hyperparameters(const Eigen::MatrixXd& train_inputs,
                                const Eigen::VectorXd& train_targets,
                                const Eigen::MatrixXd& val_inputs,
                                const Eigen::VectorXd& val_targets,
                                const GaConfig& ga_config, const HyperBounds& bounds,
                                std::uint64_t seed) {
    if (train_inputs.rows() == 0 || val_inputs.rows() == 0)
        throw DataError("tuning needs nonempty training and validation sets");
    if (!(bounds.width_low > 0 && bounds.width_low <= bounds.width_high) ||
        !(bounds.reg_low > 0 && bounds.reg_low <= bounds.reg_high))
        throw ConfigError("hyperparameter bounds must be positive with low <= high");

    // Search in log10 space. A collapsed (point) interval becomes a fixed
    // parameter rather than a GA gene.
    double wl = std::log10(bounds.width_low), wh = std::log10(bounds.width_high);
    double rl = std::log10(bounds.reg_low), rh = std::log10(bounds.reg_high);
    bool width_free = wh - wl > 0;
    bool reg_free = rh - rl > 0;

    auto val_mse_at = [&](double log_w, double log_r) {
        KernelSpec kernel{std::pow(10.0, log_w)};
        SvrModel m = fit_lssvr(train_inputs, train_targets,
                               std::pow(10.0, log_r), kernel);
        return (predict_batch(m, val_inputs) - val_targets).squaredNorm() /
               static_cast<double>(val_targets.size());
    };

    double w_mid = 0.5 * (wl + wh);
    double r_mid = 0.5 * (rl + rh);

    TuneResult result;
    if (!width_free && !reg_free) {
        result.kernel.width = std::pow(10.0, w_mid);
        result.regularization = std::pow(10.0, r_mid);
        result.val_mse = val_mse_at(w_mid, r_mid);
        return result;
    }

    std::vector<GeneBounds> gene_bounds;
    std::vector<double> midpoint;
    if (width_free) {
        gene_bounds.push_back({wl, wh});
        midpoint.push_back(w_mid);
    }
    if (reg_free) {
        gene_bounds.push_back({rl, rh});
        midpoint.push_back(r_mid);
    }

    auto decode = [&](const std::vector<double>& genes) {
        std::size_t at = 0;
        double log_w = width_free ? genes[at++] : w_mid;
        double log_r = reg_free ? genes[at++] : r_mid;
        return std::pair{log_w, log_r};
    };

    GaConfig ga = ga_config;
    ga.seed = seed;
    GaResult best = run_ga(
        [&](const std::vector<double>& genes) {
            auto [log_w, log_r] = decode(genes);
            return -val_mse_at(log_w, log_r);
        },
        gene_bounds, ga, {midpoint});

    auto [log_w, log_r] = decode(best.best.genes);
    result.kernel.width = std::pow(10.0, log_w);
    result.regularization = std::pow(10.0, log_r);
    result.val_mse = -best.best.fitness;
    return result;
}

SvrEnsemble fit_ensemble(const DataMatrix& train, const DataMatrix& validation,
                         const GaConfig& ga_config, const HyperBounds& bounds,
                         std::uint64_t seed, long subsample, int workers) {
    if (!train.fully_observed() || !validation.fully_observed())
        throw DataError("ensemble fit needs fully observed data");
    if (train.cols() != validation.cols())
        throw DataError("training and validation widths differ");
    if (subsample < 1)
        throw ConfigError("subsample must be at least 1");

    const Eigen::Index d = train.cols();
    if (d < 2)
        throw DataError("ensemble fit needs at least two variables");

    // One deterministic subsample, shared by every per-variable fit.
    Eigen::Index keep = std::min<Eigen::Index>(train.rows(), subsample);
    std::vector<Eigen::Index> rows(train.rows());
    std::iota(rows.begin(), rows.end(), 0);
    Rng rng(Rng::mix(seed, 5));
    for (Eigen::Index i = 0; i < keep; ++i) {
        std::size_t j = i + rng.uniform_int(rows.size() - i);
        std::swap(rows[i], rows[j]);
    }
    Eigen::MatrixXd sub(keep, d);
    for (Eigen::Index i = 0; i < keep; ++i) sub.row(i) = train.values.row(rows[i]);

    auto drop_column = [](const Eigen::MatrixXd& m, Eigen::Index col) {
        Eigen::MatrixXd out(m.rows(), m.cols() - 1);
        out.leftCols(col) = m.leftCols(col);
        out.rightCols(m.cols() - 1 - col) = m.rightCols(m.cols() - 1 - col);
        return out;
    };

    SvrEnsemble ensemble;
    ensemble.models.resize(d);
    std::vector<std::exception_ptr> failures(d);

    auto fit_one = [&](Eigen::Index j) {
        try {
            Eigen::MatrixXd x_train = drop_column(sub, j);
            Eigen::VectorXd y_train = sub.col(j);
            Eigen::MatrixXd x_val = drop_column(validation.values, j);
            Eigen::VectorXd y_val = validation.values.col(j);
            TuneResult tuned =
                tune_hyperparameters(x_train, y_train, x_val, y_val, ga_config,
                                     bounds, Rng::mix(seed, 100 + j));
            SvrModel model =
                fit_lssvr(x_train, y_train, tuned.regularization, tuned.kernel);
            model.target_variable = static_cast<int>(j);
            ensemble.models[j] = std::move(model);
        } catch (...) {
            failures[j] = std::current_exception();
        }
    };

    if (workers <= 1) {
        for (Eigen::Index j = 0; j < d; ++j) fit_one(j);
    } else {
        std::vector<std::thread> pool;
        std::atomic<Eigen::Index> cursor{0};
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    Eigen::Index j = cursor.fetch_add(1);
                    if (j >= d) return;
                    fit_one(j);
                }
            });
        for (auto& t : pool) t.join();
    }
    for (Eigen::Index j = 0; j < d; ++j)
        if (failures[j]) std::rethrow_exception(failures[j]);
    return ensemble;
}

} // namespace gafill
