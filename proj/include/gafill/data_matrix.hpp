#pragma once

#include <Eigen/Dense>

namespace gafill {

enum class Space { Raw, Normalized };

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Numeric records with a per-cell presence mask (true = value present).
/// The universal payload between pipeline stages. Cells with mask=false
/// hold 0.0 so absent values can never leak into computations unnoticed.
struct DataMatrix {
    Eigen::MatrixXd values;
    MaskArray mask;
    Space space = Space::Raw;

    DataMatrix() = default;
    DataMatrix(Eigen::Index rows, Eigen::Index cols, Space s = Space::Raw)
        : values(Eigen::MatrixXd::Zero(rows, cols)),
          mask(MaskArray::Constant(rows, cols, true)),
          space(s) {}

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    bool row_complete(Eigen::Index i) const {
        for (Eigen::Index j = 0; j < cols(); ++j)
            if (!mask(i, j)) return false;
        return true;
    }

    bool fully_observed() const { return mask.all(); }

    Eigen::Index missing_count() const {
        return mask.size() - mask.count();
    }
};

} // namespace gafill
