#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gafill/autoencoder.hpp"
#include "gafill/errors.hpp"
#include "gafill/rng.hpp"

using namespace gafill;

namespace {

// Points on a one-dimensional curve through [0,1]^4; a 2-unit bottleneck
// has more than enough capacity to represent them.
Eigen::MatrixXd curve_data(long n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(n, 4);
    for (long i = 0; i < n; ++i) {
        double t = rng.uniform();
        m(i, 0) = t;
        m(i, 1) = 1.0 - t;
        m(i, 2) = t * t;
        m(i, 3) = 0.5 + 0.4 * t;
    }
    return m;
}

} // namespace

TEST_CASE("the bottleneck must be narrower than the input") {
    auto data = curve_data(30, 1);
    TrainConfig config;
    config.max_cycles = 5;
    CHECK_THROWS_AS(train_autoencoder(data, data, 4, config), ConfigError);
    CHECK_THROWS_AS(train_autoencoder(data, data, 7, config), ConfigError);
    CHECK_THROWS_AS(train_autoencoder(data, data, 0, config), ConfigError);
}

TEST_CASE("a trained autoencoder reproduces structured records") {
    auto train = curve_data(220, 2);
    auto val = curve_data(60, 3);
    TrainConfig config;
    config.max_cycles = 800;
    config.seed = 7;
    auto result = train_autoencoder(train, val, 2, config);

    CHECK(result.model.dimension() == 4);
    CHECK(result.model.core.output_count() == 4);
    CHECK(result.model.core.hidden_count() == 2);
    CHECK(result.model.training_space == TrainingSpace::Identity);

    double worst = 0.0;
    for (long i = 0; i < val.rows(); ++i) {
        Eigen::VectorXd x = val.row(i).transpose();
        worst = std::max(worst, (recall(result.model, x) - x).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 0.05);

    // mean squared recall error is far below the variance of the data
    double sse = 0.0;
    for (long i = 0; i < val.rows(); ++i) {
        Eigen::VectorXd x = val.row(i).transpose();
        sse += (recall(result.model, x) - x).squaredNorm();
    }
    CHECK(sse / double(val.rows()) < 1e-3);
}

TEST_CASE("training beats the untrained network it started from") {
    auto train = curve_data(150, 5);
    auto val = curve_data(50, 6);
    TrainConfig config;
    config.max_cycles = 150;
    config.seed = 11;
    auto result = train_autoencoder(train, val, 2, config);

    auto initial = make_mlp(4, 2, 4, config.seed);
    CHECK(loss(result.model.core, val, val) < loss(initial, val, val));
}

TEST_CASE("the training space tag is carried through") {
    auto train = curve_data(60, 8);
    TrainConfig config;
    config.max_cycles = 10;
    auto tagged = train_autoencoder(train, train, 2, config,
                                    TrainingSpace::PcaTransformed);
    CHECK(tagged.model.training_space == TrainingSpace::PcaTransformed);
}

TEST_CASE("the data-matrix overload demands normalized fully-observed input") {
    TrainConfig config;
    config.max_cycles = 5;

    DataMatrix raw(30, 4, Space::Raw);
    CHECK_THROWS_AS(train_autoencoder(raw, raw, 2, config), DataError);

    DataMatrix holes(30, 4, Space::Normalized);
    holes.mask(0, 0) = false;
    CHECK_THROWS_AS(train_autoencoder(holes, holes, 2, config), DataError);

    DataMatrix ok(30, 4, Space::Normalized);
    ok.values = curve_data(30, 9);
    auto result = train_autoencoder(ok, ok, 2, config);
    CHECK(result.model.training_space == TrainingSpace::Identity);
    CHECK(result.history.size() <= 5);
}

TEST_CASE("identical seeds produce identical autoencoders") {
    auto train = curve_data(80, 12);
    TrainConfig config;
    config.max_cycles = 60;
    config.seed = 99;
    auto a = train_autoencoder(train, train, 2, config);
    auto b = train_autoencoder(train, train, 2, config);
    CHECK(a.model.core.w1 == b.model.core.w1);
    CHECK(a.model.core.w2 == b.model.core.w2);
    CHECK(a.history.size() == b.history.size());
}
