#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "isingmap/indices.hpp"
#include "isingmap/rng.hpp"

using namespace isingmap;

namespace {

IndicatorTable small_table() {
    IndicatorTable t;
    t.unit_ids = {"a", "b", "c"};
    t.values.resize(3, 2);
    t.values << 1.0, 6.0,
                2.0, 4.0,
                3.0, 2.0;
    t.specs = {{"x", +1, "G1"}, {"y", -1, "G1"}};
    return t;
}

}  // namespace

TEST_CASE("standardize maps a column to base 100 spread 10 with polarity") {
    IndicatorTable t = small_table();
    const Eigen::MatrixXd s = standardize(t);

    // column x = (1,2,3): mu = 2, population sigma = sqrt(2/3)
    const double sigma = std::sqrt(2.0 / 3.0);
    CHECK(s(0, 0) == doctest::Approx(100.0 - 10.0 / sigma).epsilon(1e-12));
    CHECK(s(1, 0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(s(2, 0) == doctest::Approx(100.0 + 10.0 / sigma).epsilon(1e-12));
    CHECK(s(0, 0) == doctest::Approx(87.7525512860841).epsilon(1e-12));

    // column y decreases with polarity -1, so its scores increase
    CHECK(s(0, 1) < s(1, 1));
    CHECK(s(1, 1) < s(2, 1));
    CHECK(s(1, 1) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("standardize rejects constant columns") {
    IndicatorTable t = small_table();
    t.values.col(1).setConstant(7.0);
    CHECK_THROWS_AS(standardize(t), ConstantIndicatorError);
}

TEST_CASE("indicator table validation") {
    IndicatorTable t = small_table();

    SUBCASE("too few rows") {
        t.values.conservativeResize(1, 2);
        t.unit_ids = {"a"};
        CHECK_THROWS_AS(t.validate(), DimensionMismatchError);
    }
    SUBCASE("unit id mismatch") {
        t.unit_ids.pop_back();
        CHECK_THROWS_AS(t.validate(), DimensionMismatchError);
    }
    SUBCASE("bad polarity") {
        t.specs[0].polarity = 0;
        CHECK_THROWS_AS(t.validate(), OutOfRangeError);
    }
    SUBCASE("non-finite cell") {
        t.values(0, 0) = std::nan("");
        CHECK_THROWS_AS(t.validate(), DegenerateInputError);
    }
}

TEST_CASE("mpi penalizes dispersion in the phenomenon direction") {
    Eigen::MatrixXd rows(2, 2);
    rows << 99.0, 101.0,   // M = 100, S = 1
            100.0, 100.0;  // balanced

    const CompositeIndexVector pos = mpi(rows, Direction::positive, {"u1", "u2"});
    CHECK(pos.scores[0] == doctest::Approx(100.0 - 1.0 / 100.0).epsilon(1e-12));
    CHECK(pos.scores[1] == 100.0);
    CHECK(pos.unit_ids.size() == 2);

    const CompositeIndexVector neg = mpi(rows, Direction::negative);
    CHECK(neg.scores[0] == doctest::Approx(100.0 + 1.0 / 100.0).epsilon(1e-12));
    CHECK(neg.scores[1] == 100.0);
}

TEST_CASE("mpi rejects rows with zero mean") {
    Eigen::MatrixXd rows(1, 2);
    rows << -1.0, 1.0;
    CHECK_THROWS_AS(mpi(rows, Direction::positive), ZeroMeanError);
}

TEST_CASE("correlation matrix fixture") {
    Eigen::MatrixXd m(3, 2);
    m << 1.0, 1.0,
         2.0, 2.0,
         3.0, 4.0;
    const Eigen::MatrixXd corr = correlation_matrix(m);
    CHECK(corr(0, 0) == 1.0);
    CHECK(corr(1, 1) == 1.0);
    // r((1,2,3), (1,2,4)) = 1 / (sqrt(2/3) * sqrt(14)/3) = sqrt(27/28)
    CHECK(corr(0, 1) == doctest::Approx(std::sqrt(27.0 / 28.0)).epsilon(1e-12));
    CHECK(corr(0, 1) == corr(1, 0));
}

TEST_CASE("correlation of an exact copy and an exact negation") {
    Eigen::MatrixXd m(4, 3);
    m.col(0) << 1.0, 5.0, 2.0, 9.0;
    m.col(1) = m.col(0);
    m.col(2) = -m.col(0);
    const Eigen::MatrixXd corr = correlation_matrix(m);
    CHECK(corr(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(corr(0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pca basics on a random well-conditioned matrix") {
    Rng rng(42);
    Eigen::MatrixXd m(40, 4);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform01() * 10.0;

    const PcaDecomposition d = pca(m);
    REQUIRE(d.lambdas.size() == 4);
    CHECK(d.lambdas.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.lambdas.minCoeff() >= 0.0);
    for (Eigen::Index k = 1; k < 4; ++k) CHECK(d.sdevs[k] <= d.sdevs[k - 1]);

    // sign convention: the largest-magnitude loading of every component is positive
    for (Eigen::Index k = 0; k < 4; ++k) {
        Eigen::Index arg = 0;
        d.loadings.col(k).cwiseAbs().maxCoeff(&arg);
        CHECK(d.loadings(arg, k) > 0.0);
    }

    // components are the standardized data rotated by the loadings, so their
    // column variances match the unnormalized eigenvalues (sdev^2)
    for (Eigen::Index k = 0; k < 4; ++k) {
        const Eigen::VectorXd c = d.components.col(k);
        const double var = (c.array() - c.mean()).square().sum() / static_cast<double>(c.size());
        CHECK(var == doctest::Approx(d.sdevs[k] * d.sdevs[k]).epsilon(1e-9));
    }
}

TEST_CASE("pca snaps collinear directions to an exactly zero eigenvalue") {
    Rng rng(7);
    Eigen::MatrixXd m(30, 3);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, 0) = rng.uniform01();
        m(i, 1) = rng.uniform01();
        m(i, 2) = m(i, 0);  // exact duplicate column
    }
    const PcaDecomposition d = pca(m);
    CHECK(d.lambdas[2] == 0.0);
    CHECK(d.sdevs[2] == 0.0);
    CHECK(d.lambdas.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pca input validation") {
    Eigen::MatrixXd square(3, 3);
    square.setRandom();
    CHECK_THROWS_AS(pca(square), DimensionMismatchError);

    Eigen::MatrixXd constant(5, 2);
    constant.col(0).setLinSpaced(5, 0.0, 1.0);
    constant.col(1).setConstant(3.0);
    CHECK_THROWS_AS(pca(constant), DegenerateInputError);
}

TEST_CASE("external field is the lambda-weighted component sum") {
    Rng rng(11);
    Eigen::MatrixXd m(25, 3);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, 0) = rng.uniform01();
        m(i, 1) = 2.0 * rng.uniform01() - 0.3 * m(i, 0);
        m(i, 2) = m(i, 0);  // plant a zero-lambda component
    }
    const PcaDecomposition d = pca(m);
    REQUIRE(d.lambdas[2] == 0.0);

    const ExternalField f = external_field(d, {}, 0);
    Eigen::VectorXd manual = Eigen::VectorXd::Zero(m.rows());
    for (Eigen::Index k = 0; k < 3; ++k) {
        if (d.lambdas[k] == 0.0) continue;
        manual += d.lambdas[k] * d.components.col(k);
    }
    // zero-lambda components are skipped outright, so the sums agree bitwise
    for (Eigen::Index i = 0; i < m.rows(); ++i) CHECK(f.h[i] == manual[i]);

    const ExternalField top1 = external_field(d, {}, 1);
    Eigen::VectorXd expect1 = d.lambdas[0] * d.components.col(0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) CHECK(top1.h[i] == expect1[i]);
}

TEST_CASE("group columns keeps first-appearance order") {
    std::vector<IndicatorSpec> specs = {
        {"a", +1, "MPI2"}, {"b", +1, "MPI1"}, {"c", -1, "MPI2"}, {"d", +1, "MPI1"}};
    const auto groups = group_columns(specs);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].first == "MPI2");
    CHECK((groups[0].second == std::vector<Eigen::Index>{0, 2}));
    CHECK(groups[1].first == "MPI1");
    CHECK((groups[1].second == std::vector<Eigen::Index>{1, 3}));
}
