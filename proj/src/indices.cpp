#include "isingmap/indices.hpp"

#include <cmath>

namespace isingmap {

namespace {

constexpr double kEigenvalueSnapTol = 1e-12;

double column_population_stddev(const Eigen::VectorXd& col, double mu) {
    const double var = (col.array() - mu).square().sum() / static_cast<double>(col.size());
    return std::sqrt(var);
}

}  // namespace

void IndicatorTable::validate() const {
    const auto n = values.rows();
    const auto m = values.cols();
    if (n < 2 || m < 1)
        throw DimensionMismatchError("indicator table needs N >= 2 units and M >= 1 indicators");
    if (static_cast<Eigen::Index>(unit_ids.size()) != n)
        throw DimensionMismatchError("unit id count does not match value rows");
    if (static_cast<Eigen::Index>(specs.size()) != m)
        throw DimensionMismatchError("indicator spec count does not match value columns");
    for (const auto& spec : specs)
        if (spec.polarity != 1 && spec.polarity != -1)
            throw OutOfRangeError("polarity of '" + spec.name + "' must be -1 or +1");
    if (!values.allFinite()) throw DegenerateInputError("indicator values contain non-finite cells");
}

Eigen::MatrixXd standardize(const IndicatorTable& table) {
    table.validate();
    const auto n = table.values.rows();
    const auto m = table.values.cols();
    Eigen::MatrixXd out(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::VectorXd col = table.values.col(j);
        const double mu = col.mean();
        const double sigma = column_population_stddev(col, mu);
        if (sigma == 0.0) throw ConstantIndicatorError(table.specs[j].name);
        const double pol = static_cast<double>(table.specs[j].polarity);
        out.col(j) = 10.0 * pol * ((col.array() - mu) / sigma) + 100.0;
    }
    return out;
}

CompositeIndexVector mpi(const Eigen::MatrixXd& standardized, Direction direction,
                         std::vector<std::string> unit_ids) {
    const auto n = standardized.rows();
    const auto m = standardized.cols();
    if (m < 1) throw DimensionMismatchError("mpi needs at least one indicator column");
    if (!unit_ids.empty() && static_cast<Eigen::Index>(unit_ids.size()) != n)
        throw DimensionMismatchError("mpi unit id count does not match rows");

    CompositeIndexVector out;
    out.unit_ids = std::move(unit_ids);
    out.direction = direction;
    out.scores.resize(n);
    const double sign = direction == Direction::positive ? -1.0 : +1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double row_mean = standardized.row(i).mean();
        if (row_mean == 0.0) throw ZeroMeanError(static_cast<std::size_t>(i));
        const double row_var =
            (standardized.row(i).array() - row_mean).square().sum() / static_cast<double>(m);
        const double row_sd = std::sqrt(row_var);
        out.scores[i] = row_mean + sign * row_sd * (row_sd / row_mean);
    }
    return out;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& matrix) {
    const auto n = matrix.rows();
    const auto p = matrix.cols();
    if (n < 2 || p < 1) throw DimensionMismatchError("correlation needs N >= 2 rows, P >= 1 columns");

    Eigen::MatrixXd z(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const Eigen::VectorXd col = matrix.col(j);
        const double mu = col.mean();
        const double sigma = column_population_stddev(col, mu);
        if (sigma == 0.0) throw ConstantIndicatorError("column " + std::to_string(j));
        z.col(j) = (col.array() - mu) / sigma;
    }
    Eigen::MatrixXd corr = (z.transpose() * z) / static_cast<double>(n);
    // symmetrize and pin the diagonal against round-off
    corr = ((corr + corr.transpose()) * 0.5).eval();
    for (Eigen::Index j = 0; j < p; ++j) corr(j, j) = 1.0;
    return corr;
}

PcaDecomposition pca(const Eigen::MatrixXd& matrix) {
    const auto n = matrix.rows();
    const auto p = matrix.cols();
    if (p < 1 || n <= p) throw DimensionMismatchError("pca needs N > P >= 1");
    if (!matrix.allFinite()) throw DegenerateInputError("pca input contains non-finite cells");

    // column-standardized input (population sigma, consistent with Eq-style z-scores)
    Eigen::MatrixXd z(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const Eigen::VectorXd col = matrix.col(j);
        const double mu = col.mean();
        const double sigma = column_population_stddev(col, mu);
        if (sigma == 0.0) throw DegenerateInputError("constant column " + std::to_string(j));
        z.col(j) = (col.array() - mu) / sigma;
    }
    const Eigen::MatrixXd corr = correlation_matrix(matrix);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
    if (solver.info() != Eigen::Success) throw DegenerateInputError("eigendecomposition failed");

    // ascending from the solver; reorder to descending eigenvalues
    Eigen::VectorXd eigenvalues(p);
    Eigen::MatrixXd vectors(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
        eigenvalues[k] = solver.eigenvalues()[p - 1 - k];
        vectors.col(k) = solver.eigenvectors().col(p - 1 - k);
    }

    const double snap = kEigenvalueSnapTol * std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < p; ++k)
        if (eigenvalues[k] < snap) eigenvalues[k] = 0.0;

    // deterministic sign: largest-magnitude loading positive
    for (Eigen::Index k = 0; k < p; ++k) {
        Eigen::Index arg = 0;
        vectors.col(k).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, k) < 0.0) vectors.col(k) = -vectors.col(k);
    }

    PcaDecomposition out;
    out.loadings = vectors;
    out.components = z * vectors;
    out.sdevs = eigenvalues.cwiseSqrt();
    const double total = eigenvalues.sum();
    if (total <= 0.0) throw DegenerateInputError("correlation matrix has no positive eigenvalues");
    out.lambdas = eigenvalues / total;
    return out;
}

ExternalField external_field(const PcaDecomposition& decomposition,
                             std::vector<std::string> unit_ids, int top_components) {
    const auto n = decomposition.components.rows();
    const auto p = decomposition.components.cols();
    if (decomposition.lambdas.size() != p)
        throw DimensionMismatchError("lambda count does not match component count");
    if (!unit_ids.empty() && static_cast<Eigen::Index>(unit_ids.size()) != n)
        throw DimensionMismatchError("external field unit id count does not match rows");

    Eigen::Index keep = p;
    if (top_components > 0 && top_components < p) keep = top_components;

    ExternalField out;
    out.unit_ids = std::move(unit_ids);
    out.h = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < keep; ++k) {
        const double lambda = decomposition.lambdas[k];
        if (lambda == 0.0) continue;  // zero-variance components contribute nothing
        out.h += lambda * decomposition.components.col(k);
    }
    return out;
}

std::vector<std::pair<std::string, std::vector<Eigen::Index>>> group_columns(
    const std::vector<IndicatorSpec>& specs) {
    std::vector<std::pair<std::string, std::vector<Eigen::Index>>> groups;
    for (std::size_t j = 0; j < specs.size(); ++j) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == specs[j].group; });
        if (it == groups.end()) {
            groups.emplace_back(specs[j].group, std::vector<Eigen::Index>{static_cast<Eigen::Index>(j)});
        } else {
            it->second.push_back(static_cast<Eigen::Index>(j));
        }
    }
    return groups;
}

}  // namespace isingmap
