#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "gradridge/polybasis.hpp"

using namespace gradridge;

namespace {

// Gauss nodes/weights for the family's probability measure via the
// Golub-Welsch eigenvalue method on the monic Jacobi matrix.
void gauss_rule(Family family, int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = family == Family::HermiteProbabilist
                             ? static_cast<double>(k)
                             : k * k / (4.0 * k * k - 1.0);
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    nodes = solver.eigenvalues();
    weights.resize(n);
    for (int k = 0; k < n; ++k) {
        const double first = solver.eigenvectors()(0, k);
        weights(k) = first * first;  // total mass one for probability measures
    }
}

// Monic probabilists' Hermite by the raw recurrence, normalized by the
// factorial afterwards. Independent of the normalized recurrence under test.
double monic_hermite_normalized(int n, double x) {
    double hm1 = 0.0, h = 1.0;
    for (int k = 0; k < n; ++k) {
        const double next = x * h - k * hm1;
        hm1 = h;
        h = next;
    }
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    return h / std::sqrt(fact);
}

}  // namespace

TEST_CASE("orthonormality under Gauss quadrature, degrees <= 10") {
    for (Family family : {Family::HermiteProbabilist, Family::LegendreUniform}) {
        Eigen::VectorXd nodes, weights;
        gauss_rule(family, 32, nodes, weights);
        const int deg = 10;
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(deg + 1, deg + 1);
        std::vector<double> vals(deg + 1), ders(deg + 1);
        for (int q = 0; q < nodes.size(); ++q) {
            eval_univariate(family, deg, nodes(q), vals.data(), ders.data());
            for (int i = 0; i <= deg; ++i)
                for (int j = 0; j <= deg; ++j) gram(i, j) += weights(q) * vals[i] * vals[j];
        }
        const Eigen::MatrixXd err = gram - Eigen::MatrixXd::Identity(deg + 1, deg + 1);
        CHECK(err.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("explicit low-degree values") {
    double v[6], d[6];
    eval_univariate(Family::HermiteProbabilist, 2, 0.0, v, d);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(v[2] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));

    eval_univariate(Family::LegendreUniform, 1, 1.0, v, d);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("normalized recurrence matches the monic-plus-factorial route") {
    double v[6], d[6];
    eval_univariate(Family::HermiteProbabilist, 5, 0.7, v, d);
    for (int n = 0; n <= 5; ++n)
        CHECK(std::abs(v[n] - monic_hermite_normalized(n, 0.7)) < 1e-12);
}

TEST_CASE("univariate derivatives match finite differences") {
    const double h = 1e-6;
    for (Family family : {Family::HermiteProbabilist, Family::LegendreUniform}) {
        for (double x : {-0.73, -0.2, 0.11, 0.52, 0.9}) {
            double v[11], d[11], vp[11], vm[11], dummy[11];
            eval_univariate(family, 10, x, v, d);
            eval_univariate(family, 10, x + h, vp, dummy);
            eval_univariate(family, 10, x - h, vm, dummy);
            for (int n = 1; n <= 10; ++n) {
                const double fd = (vp[n] - vm[n]) / (2 * h);
                CHECK(std::abs(fd - d[n]) < 1e-6 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("degree-1 Hermite product basis is the identity") {
    MultiIndexSet set(2);
    set.insert({1, 0});
    set.insert({0, 1});
    ProductBasis basis(Family::HermiteProbabilist, set);
    Eigen::VectorXd x(2);
    x << 0.3, -0.2;
    Eigen::VectorXd phi;
    Eigen::MatrixXd grad;
    basis.eval(x, phi, grad);
    CHECK(phi(0) == doctest::Approx(0.3));
    CHECK(phi(1) == doctest::Approx(-0.2));
    CHECK((grad - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pure square closed form") {
    MultiIndexSet set(2);
    set.insert({2, 0});
    ProductBasis basis(Family::HermiteProbabilist, set);
    Eigen::VectorXd x(2);
    x << 1.0, 5.0;
    Eigen::VectorXd phi;
    Eigen::MatrixXd grad;
    basis.eval(x, phi, grad);
    CHECK(phi(0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(grad(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(grad(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("product basis gradients match finite differences") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> unif(-1.2, 1.2);
    MultiIndexSet closure(3);
    closure.insert({0, 0, 0});
    while (closure.size() < 11) {
        const MultiIndexSet margin = closure.reduced_margin();
        closure.insert(margin[static_cast<int>(gen() % static_cast<unsigned>(margin.size()))]);
    }
    ProductBasis basis(Family::HermiteProbabilist, closure);

    const double h = 1e-6;
    for (int trial = 0; trial < 4; ++trial) {
        Eigen::VectorXd x(3);
        for (int j = 0; j < 3; ++j) x(j) = unif(gen);
        Eigen::VectorXd phi;
        Eigen::MatrixXd grad;
        basis.eval(x, phi, grad);
        for (int j = 0; j < 3; ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            const Eigen::VectorXd fd = (basis.eval_values(xp) - basis.eval_values(xm)) / (2 * h);
            for (int k = 0; k < basis.size(); ++k)
                CHECK(std::abs(fd(k) - grad(k, j)) < 1e-6 * std::max(1.0, std::abs(fd(k))));
        }
    }
}

TEST_CASE("products with disjoint supports factor") {
    MultiIndexSet set(4);
    const MultiIndex a{2, 1, 0, 0}, b{0, 0, 3, 1}, sum{2, 1, 3, 1};
    set.insert(a);
    set.insert(b);
    set.insert(sum);
    ProductBasis basis(Family::HermiteProbabilist, set);
    Eigen::VectorXd x(4);
    x << 0.4, -1.1, 0.8, 0.3;
    const Eigen::VectorXd phi = basis.eval_values(x);
    CHECK(phi(2) == doctest::Approx(phi(0) * phi(1)).epsilon(1e-13));
}

TEST_CASE("empirical covariance") {
    SUBCASE("single point, degree-1 basis") {
        MultiIndexSet set(1);
        set.insert({1});
        ProductBasis basis(Family::HermiteProbabilist, set);
        Eigen::MatrixXd pts(1, 1);
        pts << 2.0;
        const Eigen::MatrixXd cov = empirical_covariance(basis, pts);
        CHECK(cov(0, 0) == doctest::Approx(4.0));
    }

    SUBCASE("approaches identity for large normal samples") {
        MultiIndexSet set = MultiIndexSet::total_degree_set(2, 2, 1);
        ProductBasis basis(Family::HermiteProbabilist, set);
        std::mt19937 gen(11);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd pts(20000, 2);
        for (int i = 0; i < pts.rows(); ++i)
            for (int j = 0; j < 2; ++j) pts(i, j) = normal(gen);
        const Eigen::MatrixXd cov = empirical_covariance(basis, pts);
        CHECK((cov - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() <
              0.12);
    }

    SUBCASE("matches the naive double loop") {
        MultiIndexSet set = MultiIndexSet::total_degree_set(2, 2, 1);
        ProductBasis basis(Family::HermiteProbabilist, set);
        REQUIRE(set.size() == 5);
        std::mt19937 gen(12);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd pts(50, 2);
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 2; ++j) pts(i, j) = normal(gen);

        Eigen::MatrixXd naive = Eigen::MatrixXd::Zero(5, 5);
        for (int i = 0; i < 50; ++i) {
            const Eigen::VectorXd phi = basis.eval_values(pts.row(i).transpose());
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 5; ++c) naive(r, c) += phi(r) * phi(c) / 50.0;
        }
        const Eigen::MatrixXd cov = empirical_covariance(basis, pts);
        CHECK((cov - naive).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("parallel table construction matches serial") {
    MultiIndexSet set = MultiIndexSet::total_degree_set(3, 3, 1);
    ProductBasis basis(Family::LegendreUniform, set);
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd pts(40, 3);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 3; ++j) pts(i, j) = unif(gen);
    const Eigen::MatrixXd serial = empirical_covariance(basis, pts, ExecConfig{1});
    const Eigen::MatrixXd parallel = empirical_covariance(basis, pts, ExecConfig{4});
    CHECK((serial - parallel).cwiseAbs().maxCoeff() < 1e-13);
}
