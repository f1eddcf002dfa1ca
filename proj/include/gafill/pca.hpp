#pragma once

#include "gafill/data_matrix.hpp"

#include <Eigen/Dense>

namespace gafill {

/// Principal component basis fit from data: column means, the top-k unit
/// eigenvectors of the covariance (columns, descending eigenvalue order),
/// and the retained eigenvalues.
struct PcaTransform {
    Eigen::VectorXd mean;        // length d
    Eigen::MatrixXd components;  // d x k, orthonormal columns
    Eigen::VectorXd eigenvalues; // length k, non-increasing

    int input_dimension() const { return static_cast<int>(components.rows()); }
    int k() const { return static_cast<int>(components.cols()); }

    /// (rows - mean) * components; output has k columns.
    Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const;
    Eigen::VectorXd transform(const Eigen::VectorXd& row) const;

    /// p * components^T + mean. The transpose acts as the inverse on the
    /// retained subspace (exact when k = d).
    Eigen::MatrixXd inverse_transform(const Eigen::MatrixXd& p) const;
    Eigen::VectorXd inverse_transform(const Eigen::VectorXd& p) const;
};

/// Covariance uses the 1/(n-1) estimator; eigenvector signs are fixed so
/// each column's largest-magnitude entry is positive.
PcaTransform fit_pca(const Eigen::MatrixXd& data, int k);

/// Requires fully observed data.
PcaTransform fit_pca(const DataMatrix& data, int k);

} // namespace gafill
