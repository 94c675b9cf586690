#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <utility>
#include <vector>

// Smallest generalized eigenvalue of A x = lambda B x for sparse SPD pairs
// (blocked LOBPCG with a shifted direct-factorization preconditioner), and
// the log-log power-law fit of a thickness sweep.

namespace shellkorn {

struct EigOptions {
    double tol = 1e-8;       // relative residual |Ax - lambda Bx| / (|Ax| + lambda |Bx|)
    int max_iter = 5000;
    int block = 2;           // <= 4
    uint64_t seed = 1;
    int warmup_steps = 20;   // inverse-power steps estimating the shift
};

struct EigReport {
    double lambda_min = 0.0;
    Eigen::VectorXd eigenvector;
    double rel_residual = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    bool converged = false;
};

// Throws std::invalid_argument on dimension mismatch or tol outside (0, 1e-4];
// throws std::runtime_error when B is detected non-SPD.
EigReport smallest_eig(const Eigen::SparseMatrix<double>& A,
                       const Eigen::SparseMatrix<double>& B, const EigOptions& opts = {});

struct PowerFit {
    double slope = 0.0;      // scaling exponent beta
    double intercept = 0.0;  // log of the prefactor
    double stderr_slope = 0.0;
};

// Least-squares line through (log h, log lambda); needs >= 3 positive points.
PowerFit fit_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace shellkorn
