#pragma once

#include "gafill/data_matrix.hpp"
#include "gafill/mlp.hpp"

namespace gafill {

/// Which representation the network recalls: the normalized records
/// themselves or their principal-component projection.
enum class TrainingSpace { Identity, PcaTransformed };

/// Recall network: an MLP trained to reproduce its input through a
/// bottleneck hidden layer (hidden_count < input_count).
struct AutoencoderModel {
    MlpModel core;
    TrainingSpace training_space = TrainingSpace::Identity;

    int dimension() const { return core.input_count(); }
};

struct AutoencoderTrainResult {
    AutoencoderModel model;
    std::vector<CyclePoint> history;
};

/// Trains on raw matrices (rows are samples, targets = inputs). The space
/// tag is recorded as given; callers pass PcaTransformed when the rows are
/// component-space projections.
AutoencoderTrainResult train_autoencoder(const Eigen::MatrixXd& train,
                                         const Eigen::MatrixXd& validation,
                                         int hidden_count,
                                         const TrainConfig& config,
                                         TrainingSpace space = TrainingSpace::Identity);

/// Convenience overload for normalized datasets; requires fully observed
/// input in normalized space.
AutoencoderTrainResult train_autoencoder(const DataMatrix& train,
                                         const DataMatrix& validation,
                                         int hidden_count,
                                         const TrainConfig& config);

Eigen::VectorXd recall(const AutoencoderModel& model, const Eigen::VectorXd& x);

} // namespace gafill
