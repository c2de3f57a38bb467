#ifndef ISINGMAP_INDICES_HPP
#define ISINGMAP_INDICES_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "isingmap/error.hpp"

namespace isingmap {

/// Whether a composite index measures a positive or a negative phenomenon.
/// Controls the sign of the dispersion penalty in the MPI aggregation.
enum class Direction { positive, negative };

struct IndicatorSpec {
    std::string name;
    int polarity = +1;   // +1 or -1
    std::string group;   // composite-index label, e.g. "MPI1"
};

/// Per-unit base indicators. Values must be complete (no missing cells).
struct IndicatorTable {
    std::vector<std::string> unit_ids;  // N
    Eigen::MatrixXd values;             // N x M
    std::vector<IndicatorSpec> specs;   // M

    void validate() const;
};

struct CompositeIndexVector {
    std::vector<std::string> unit_ids;
    Eigen::VectorXd scores;
    Direction direction = Direction::positive;
};

/// Principal-component decomposition of a column-standardized matrix.
/// `lambdas` are correlation-matrix eigenvalues normalized to sum 1;
/// `sdevs` (= sqrt of the eigenvalues) are non-increasing.
struct PcaDecomposition {
    Eigen::MatrixXd components;  // N x P unit scores
    Eigen::MatrixXd loadings;    // P x P, one column per component
    Eigen::VectorXd lambdas;     // P, non-negative, sum 1
    Eigen::VectorXd sdevs;       // P, non-increasing
};

/// Per-unit scalar field driving the sampler, ordered like the unit roster.
struct ExternalField {
    std::vector<std::string> unit_ids;
    Eigen::VectorXd h;
};

struct ConstantIndicatorError : Error {
    explicit ConstantIndicatorError(const std::string& column)
        : Error("constant indicator column '" + column + "' has zero standard deviation") {}
};

struct ZeroMeanError : Error {
    explicit ZeroMeanError(std::size_t unit)
        : Error("unit " + std::to_string(unit) + " has zero profile mean; penalty undefined") {}
};

/// z-score standardization to base 100 / spread 10 with per-column polarity:
/// cell = 10 * pol_j * (x_ij - mu_j) / sigma_j + 100, population sigma.
/// Throws ConstantIndicatorError when a column has zero standard deviation.
Eigen::MatrixXd standardize(const IndicatorTable& table);

/// Mazziotta-Pareto aggregation of a standardized profile:
/// score_i = M_i -/+ S_i * (S_i / M_i) for positive/negative phenomena,
/// with M_i, S_i the row mean and row population standard deviation.
CompositeIndexVector mpi(const Eigen::MatrixXd& standardized, Direction direction,
                         std::vector<std::string> unit_ids = {});

/// PCA of the column correlation structure. Component signs are fixed so the
/// largest-magnitude loading of each component is positive. Eigenvalues below
/// 1e-12 of the largest are snapped to exactly zero, so collinear inputs yield
/// components that provably contribute nothing downstream.
PcaDecomposition pca(const Eigen::MatrixXd& matrix);

/// Variance-weighted aggregation of the principal components:
/// h = sum_i lambda_i * pc_i, skipping components with lambda_i == 0.
/// `top_components` = 0 keeps all components, otherwise only the first ones.
ExternalField external_field(const PcaDecomposition& decomposition,
                             std::vector<std::string> unit_ids = {}, int top_components = 0);

/// Pearson correlation matrix of the columns; symmetric with unit diagonal.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& matrix);

/// Column indices per composite-index group, in order of first appearance.
std::vector<std::pair<std::string, std::vector<Eigen::Index>>> group_columns(
    const std::vector<IndicatorSpec>& specs);

}  // namespace isingmap

#endif
