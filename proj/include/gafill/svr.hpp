#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "gafill/data_matrix.hpp"
#include "gafill/ga.hpp"

namespace gafill {

/// RBF kernel k(x, z) = exp(-|x-z|^2 / (2 width^2)).
struct KernelSpec {
    double width = 1.0;
};

/// Least-squares SVR in dual form: f(x) = sum_i alpha_i k(x_i, x) + bias.
struct SvrModel {
    Eigen::MatrixXd support_inputs;
    Eigen::VectorXd alphas;
    double bias = 0.0;
    KernelSpec kernel;
    double regularization = 1.0;
    int target_variable = -1;     // schema column this model predicts
    double system_residual = 0.0; // dual-system residual stored at fit time
};

/// One model per schema variable, each predicting its column from the
/// other d-1 columns.
struct SvrEnsemble {
    std::vector<SvrModel> models;

    int dimension() const { return static_cast<int>(models.size()); }
};

struct HyperBounds {
    double width_low = 1e-2;
    double width_high = 1e2;
    double reg_low = 1e-2;
    double reg_high = 1e6;
};

struct TuneResult {
    KernelSpec kernel;
    double regularization = 1.0;
    double val_mse = 0.0;
};

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b);

/// Solves [[0, 1^T], [1, K + I/reg]] [b; alpha] = [0; y] by Cholesky with
/// diagonal jitter up to 1e-8 on failure.
SvrModel fit_lssvr(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                   double regularization, const KernelSpec& kernel);

double predict(const SvrModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd predict_batch(const SvrModel& model, const Eigen::MatrixXd& inputs);

/// GA search over log10(width) and log10(regularization); the bounds'
/// midpoint is injected into the initial population, so the returned
/// validation MSE never exceeds the midpoint's. Candidates whose fit
/// fails count as unusable and the run continues.
TuneResult tune_hyperparameters(const Eigen::MatrixXd& train_inputs,
                                const Eigen::VectorXd& train_targets,
                                const Eigen::MatrixXd& val_inputs,
                                const Eigen::VectorXd& val_targets,
                                const GaConfig& ga_config, const HyperBounds& bounds,
                                std::uint64_t seed);

/// Fits one tuned model per column on at most `subsample` training rows
/// (deterministic subsample under seed). Per-column fits are independent
/// and run on `workers` threads.
SvrEnsemble fit_ensemble(const DataMatrix& train, const DataMatrix& validation,
                         const GaConfig& ga_config, const HyperBounds& bounds,
                         std::uint64_t seed, long subsample = 3000, int workers = 1);

} // namespace gafill
