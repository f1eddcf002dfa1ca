#include "gafill/pca.hpp"

#include <Eigen/Eigenvalues>

#include "gafill/errors.hpp"

namespace gafill {

Eigen::MatrixXd PcaTransform::transform(const Eigen::MatrixXd& rows) const {
    if (rows.cols() != components.rows())
        throw DataError("row width " + std::to_string(rows.cols()) +
                        " does not match the fitted dimension " +
                        std::to_string(components.rows()));
    return (rows.rowwise() - mean.transpose()) * components;
}

Eigen::VectorXd PcaTransform::transform(const Eigen::VectorXd& row) const {
    if (row.size() != components.rows())
        throw DataError("vector length does not match the fitted dimension");
    return components.transpose() * (row - mean);
}

Eigen::MatrixXd PcaTransform::inverse_transform(const Eigen::MatrixXd& p) const {
    if (p.cols() != components.cols())
        throw DataError("component width " + std::to_string(p.cols()) +
                        " does not match k = " + std::to_string(components.cols()));
    return (p * components.transpose()).rowwise() + mean.transpose();
}

Eigen::VectorXd PcaTransform::inverse_transform(const Eigen::VectorXd& p) const {
    if (p.size() != components.cols())
        throw DataError("component length does not match k");
    return components * p + mean;
}

PcaTransform fit_pca(const Eigen::MatrixXd& data, int k) {
    const Eigen::Index n = data.rows();
    const Eigen::Index d = data.cols();
    if (n < 2)
        throw DataError("component fit needs at least 2 rows");
    if (k < 1 || k > d)
        throw ConfigError("k = " + std::to_string(k) +
                          " must lie in 1.." + std::to_string(d));

    PcaTransform t;
    t.mean = data.colwise().mean();
    Eigen::MatrixXd centered = data.rowwise() - t.mean.transpose();
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigendecomposition of the covariance failed");

    // Solver returns ascending eigenvalues; take the top k in descending
    // order and clamp tiny negative values from rounding.
    t.components.resize(d, k);
    t.eigenvalues.resize(k);
    for (int j = 0; j < k; ++j) {
        Eigen::Index src = d - 1 - j;
        Eigen::VectorXd col = solver.eigenvectors().col(src);
        Eigen::Index peak;
        col.cwiseAbs().maxCoeff(&peak);
        if (col(peak) < 0) col = -col;
        t.components.col(j) = col;
        t.eigenvalues(j) = std::max(0.0, solver.eigenvalues()(src));
    }
    return t;
}

PcaTransform fit_pca(const DataMatrix& data, int k) {
    if (data.space != Space::Normalized)
        throw DataError("component fit expects normalized data");
    if (!data.fully_observed())
        throw DataError("component fit needs fully observed data");
    return fit_pca(data.values, k);
}

} // namespace gafill
