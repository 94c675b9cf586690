#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "shellkorn/eigensolve.hpp"

using namespace shellkorn;

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat sparse_of(const Eigen::MatrixXd& m) {
    SpMat s = m.sparseView();
    s.makeCompressed();
    return s;
}

// random SPD matrix with eigenvalues bounded away from zero
Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng, double shift) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = gauss(rng);
    return r.transpose() * r + shift * Eigen::MatrixXd::Identity(n, n);
}

double dense_smallest(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
    return es.eigenvalues()(0);
}

}  // namespace

TEST_CASE("identical forms give eigenvalue one") {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd a = random_spd(30, rng, 1.0);
    EigReport rep = smallest_eig(sparse_of(a), sparse_of(a));
    CHECK(rep.converged);
    CHECK(rep.lambda_min == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("diagonal pencil has the smallest diagonal ratio") {
    Eigen::MatrixXd a = Eigen::Vector2d(2.0, 3.0).asDiagonal();
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2, 2);
    EigReport rep = smallest_eig(sparse_of(a), sparse_of(b));
    CHECK(rep.converged);
    CHECK(rep.lambda_min == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("random pencils match the dense eigendecomposition") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> size(5, 100);
    for (int k = 0; k < 20; ++k) {
        const int n = size(rng);
        Eigen::MatrixXd a = random_spd(n, rng, 0.1);
        Eigen::MatrixXd b = random_spd(n, rng, double(n));
        const double exact = dense_smallest(a, b);
        EigReport rep = smallest_eig(sparse_of(a), sparse_of(b));
        REQUIRE(rep.converged);
        CHECK(std::abs(rep.lambda_min - exact) <= 1e-8 * exact);
    }
}

TEST_CASE("scaling the first form scales the eigenvalue") {
    std::mt19937_64 rng(7);
    Eigen::MatrixXd a = random_spd(40, rng, 0.5);
    Eigen::MatrixXd b = random_spd(40, rng, 40.0);
    EigReport base = smallest_eig(sparse_of(a), sparse_of(b));
    EigReport scaled = smallest_eig(sparse_of(Eigen::MatrixXd(3.5 * a)), sparse_of(b));
    REQUIRE(base.converged);
    REQUIRE(scaled.converged);
    CHECK(std::abs(scaled.lambda_min - 3.5 * base.lambda_min) <= 1e-10 * scaled.lambda_min);
}

TEST_CASE("simultaneous symmetric permutation leaves the eigenvalue invariant") {
    std::mt19937_64 rng(11);
    const int n = 60;
    Eigen::MatrixXd a = random_spd(n, rng, 0.5);
    Eigen::MatrixXd b = random_spd(n, rng, double(n));
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + n, rng);
    Eigen::MatrixXd ap = perm.transpose() * a * perm;
    Eigen::MatrixXd bp = perm.transpose() * b * perm;
    EigReport r1 = smallest_eig(sparse_of(a), sparse_of(b));
    EigReport r2 = smallest_eig(sparse_of(ap), sparse_of(bp));
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    CHECK(std::abs(r1.lambda_min - r2.lambda_min) <= 1e-10 * r1.lambda_min);
}

TEST_CASE("same seed reproduces the iteration bitwise") {
    std::mt19937_64 rng(13);
    Eigen::MatrixXd a = random_spd(50, rng, 0.5);
    Eigen::MatrixXd b = random_spd(50, rng, 50.0);
    EigOptions opts;
    opts.seed = 99;
    EigReport r1 = smallest_eig(sparse_of(a), sparse_of(b), opts);
    EigReport r2 = smallest_eig(sparse_of(a), sparse_of(b), opts);
    CHECK(r1.lambda_min == r2.lambda_min);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.rel_residual == r2.rel_residual);
}

TEST_CASE("converged residual honors the tolerance and lambda stays in (0, 1] for A <= B") {
    std::mt19937_64 rng(17);
    Eigen::MatrixXd b = random_spd(40, rng, 40.0);
    // shrink B's spectral pieces by factors in (0, 1]: the generalized
    // eigenvalues are exactly those factors, so A is SPD with A <= B
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    Eigen::VectorXd factors(40);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    for (int i = 0; i < 40; ++i) factors(i) = unif(rng);
    Eigen::MatrixXd a = es.eigenvectors() *
                        (es.eigenvalues().array() * factors.array()).matrix().asDiagonal() *
                        es.eigenvectors().transpose();
    EigOptions opts;
    opts.tol = 1e-9;
    EigReport rep = smallest_eig(sparse_of(a), sparse_of(b), opts);
    REQUIRE(rep.converged);
    CHECK(rep.rel_residual <= 1e-9);
    CHECK(rep.lambda_min > 0.0);
    CHECK(rep.lambda_min <= 1.0);
}

TEST_CASE("input validation") {
    std::mt19937_64 rng(19);
    Eigen::MatrixXd a = random_spd(10, rng, 1.0);
    Eigen::MatrixXd b = random_spd(12, rng, 1.0);
    CHECK_THROWS_AS(smallest_eig(sparse_of(a), sparse_of(b)), std::invalid_argument);

    EigOptions bad_tol;
    bad_tol.tol = 1e-3;  // outside (0, 1e-4]
    CHECK_THROWS_AS(smallest_eig(sparse_of(a), sparse_of(a), bad_tol), std::invalid_argument);

    Eigen::MatrixXd indef = Eigen::MatrixXd::Identity(10, 10);
    indef(3, 3) = -1.0;
    CHECK_THROWS_AS(smallest_eig(sparse_of(a), sparse_of(indef)), std::runtime_error);
}

TEST_CASE("fit recovers an exact power law") {
    std::vector<std::pair<double, double>> pts;
    for (double h : {0.15, 0.1, 0.07, 0.05, 0.03}) pts.emplace_back(h, 7.0 * std::pow(h, 4.0 / 3.0));
    PowerFit fit = fit_exponent(pts);
    CHECK(std::abs(fit.slope - 4.0 / 3.0) < 1e-12);
    CHECK(std::abs(std::exp(fit.intercept) - 7.0) < 1e-10);
    CHECK(fit.stderr_slope < 1e-12);

    std::vector<std::pair<double, double>> lin;
    for (double h : {0.2, 0.1, 0.05}) lin.emplace_back(h, 0.3 * h);
    CHECK(std::abs(fit_exponent(lin).slope - 1.0) < 1e-12);
}

TEST_CASE("fit matches the two-point slope on a three-point power law") {
    // two anchor points plus the geometric midpoint on the same law
    const double slope = std::log(1e-3 / 4.1e-4) / std::log(2.0);  // ~1.286
    const double hm = std::sqrt(0.1 * 0.05);
    const double lm = 1e-3 * std::pow(hm / 0.1, slope);
    std::vector<std::pair<double, double>> pts{{0.1, 1e-3}, {hm, lm}, {0.05, 4.1e-4}};
    PowerFit fit = fit_exponent(pts);
    CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-10));
}

TEST_CASE("fit input validation") {
    std::vector<std::pair<double, double>> two{{0.1, 1.0}, {0.05, 0.5}};
    CHECK_THROWS_AS(fit_exponent(two), std::invalid_argument);
    std::vector<std::pair<double, double>> neg{{0.1, 1.0}, {0.05, -0.5}, {0.03, 0.2}};
    CHECK_THROWS_AS(fit_exponent(neg), std::invalid_argument);
    std::vector<std::pair<double, double>> same_h{{0.1, 1.0}, {0.1, 0.5}, {0.1, 0.2}};
    CHECK_THROWS_AS(fit_exponent(same_h), std::invalid_argument);
}
