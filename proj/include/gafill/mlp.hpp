#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gafill {

/// Two-layer perceptron, tanh hidden units, linear outputs:
///   y_k = sum_j w2(k,j) * tanh(sum_i w1(j,i) * x_i + b1(j)) + b2(k)
struct MlpModel {
    Eigen::MatrixXd w1; // hidden x input
    Eigen::VectorXd b1; // hidden
    Eigen::MatrixXd w2; // output x hidden
    Eigen::VectorXd b2; // output

    int input_count() const { return static_cast<int>(w1.cols()); }
    int hidden_count() const { return static_cast<int>(w1.rows()); }
    int output_count() const { return static_cast<int>(w2.rows()); }
};

struct MlpGradient {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;
};

struct TrainConfig {
    int max_cycles = 1000;
    int patience = 50; // validation checks without improvement before stop
    std::uint64_t seed = 0;
    double weight_init_scale = 0.0; // 0 means 1/sqrt(fan-in) per layer
};

struct CyclePoint {
    double train_loss;
    double validation_loss;
};

struct TrainResult {
    MlpModel model; // snapshot with the lowest validation loss seen
    std::vector<CyclePoint> history;
};

struct HiddenSearchResult {
    int best;
    std::vector<std::pair<int, double>> table; // candidate, mean val loss
};

/// Weights uniform in [-s, s], s = weight_init_scale or 1/sqrt(fan-in).
MlpModel make_mlp(int input_count, int hidden_count, int output_count,
                  std::uint64_t seed, double weight_init_scale = 0.0);

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x);

/// Rows are samples.
Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs);

/// (1/2) * sum of squared residuals over all rows and outputs.
double loss(const MlpModel& model, const Eigen::MatrixXd& inputs,
            const Eigen::MatrixXd& targets);

MlpGradient gradient(const MlpModel& model, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets);

/// Full-batch scaled conjugate gradient. One cycle is one SCG iteration.
/// Validation loss is checked every cycle; training stops after `patience`
/// cycles without improvement and the best snapshot is returned.
TrainResult train_scg(MlpModel model, const Eigen::MatrixXd& train_inputs,
                      const Eigen::MatrixXd& train_targets,
                      const Eigen::MatrixXd& val_inputs,
                      const Eigen::MatrixXd& val_targets,
                      const TrainConfig& config);

/// Trains `repeats` networks per candidate hidden count under derived seeds
/// and returns the candidate with the lowest mean validation loss. Ties
/// (within 1e-12) go to the smaller count.
HiddenSearchResult select_hidden_count(const std::vector<int>& candidates,
                                       const Eigen::MatrixXd& train_inputs,
                                       const Eigen::MatrixXd& train_targets,
                                       const Eigen::MatrixXd& val_inputs,
                                       const Eigen::MatrixXd& val_targets,
                                       const TrainConfig& config, int repeats);

} // namespace gafill
