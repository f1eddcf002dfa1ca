#include "gafill/autoencoder.hpp"

#include "gafill/errors.hpp"

namespace gafill {

AutoencoderTrainResult train_autoencoder(const Eigen::MatrixXd& train,
                                         const Eigen::MatrixXd& validation,
                                         int hidden_count,
                                         const TrainConfig& config,
                                         TrainingSpace space) {
    const int d = static_cast<int>(train.cols());
    if (hidden_count >= d)
        throw ConfigError("recall network needs a bottleneck: hidden count " +
                          std::to_string(hidden_count) +
                          " must be below the data dimension " + std::to_string(d));
    if (hidden_count < 1)
        throw ConfigError("hidden count must be at least 1");
    if (validation.cols() != d)
        throw DataError("validation width does not match training width");

    MlpModel init = make_mlp(d, hidden_count, d, config.seed,
                             config.weight_init_scale);
    TrainResult trained =
        train_scg(std::move(init), train, train, validation, validation, config);

    AutoencoderTrainResult result;
    result.model.core = std::move(trained.model);
    result.model.training_space = space;
    result.history = std::move(trained.history);
    return result;
}

AutoencoderTrainResult train_autoencoder(const DataMatrix& train,
                                         const DataMatrix& validation,
                                         int hidden_count,
                                         const TrainConfig& config) {
    if (!train.fully_observed() || !validation.fully_observed())
        throw DataError("recall training needs fully observed data");
    if (train.space != Space::Normalized || validation.space != Space::Normalized)
        throw DataError("recall training expects normalized data");
    return train_autoencoder(train.values, validation.values, hidden_count,
                             config, TrainingSpace::Identity);
}

Eigen::VectorXd recall(const AutoencoderModel& model, const Eigen::VectorXd& x) {
    return forward(model.core, x);
}

} // namespace gafill
