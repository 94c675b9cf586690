#include "shellkorn/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace shellkorn {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// B-orthonormalize the columns of S in place (modified Gram-Schmidt, two
// passes); drops near-dependent columns. Returns the kept count.
int b_orthonormalize(Eigen::MatrixXd& S, const SpMat& B) {
    const double drop_tol = 1e-10;
    int kept = 0;
    Eigen::MatrixXd BS(S.rows(), S.cols());
    for (int c = 0; c < S.cols(); ++c) {
        Eigen::VectorXd v = S.col(c);
        double norm0 = 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < kept; ++k) v -= BS.col(k).dot(v) * S.col(k);
            Eigen::VectorXd Bv = B * v;
            const double nb = v.dot(Bv);
            if (nb < 0.0) throw std::runtime_error("non-SPD B detected");
            const double norm = std::sqrt(std::max(0.0, nb));
            if (pass == 0) norm0 = norm;
            if (norm <= drop_tol * std::max(1.0, norm0) || norm == 0.0) {
                v.setZero();
                break;
            }
            v /= norm;
        }
        if (v.isZero(0.0)) continue;
        S.col(kept) = v;
        BS.col(kept) = B * v;
        ++kept;
    }
    S.conservativeResize(Eigen::NoChange, kept);
    return kept;
}

}  // namespace

EigReport smallest_eig(const SpMat& A, const SpMat& B, const EigOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw std::invalid_argument("smallest_eig: A and B must be square and of equal size");
    if (!(opts.tol > 0.0) || opts.tol > 1e-4)
        throw std::invalid_argument("smallest_eig: tol must lie in (0, 1e-4]");
    const int n = static_cast<int>(A.rows());
    if (n == 0) throw std::invalid_argument("smallest_eig: empty system");
    int block = std::min(std::max(opts.block, 1), 4);
    block = std::min(block, n);

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_matrix = [&](int cols) {
        Eigen::MatrixXd M(n, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < n; ++r) M(r, c) = gauss(rng);
        return M;
    };

    // shift estimate: exact inverse-power warm-up on A z = B x
    double sigma;
    Eigen::VectorXd warm_x;
    {
        Eigen::SimplicialLDLT<SpMat> lltA(A);
        if (lltA.info() != Eigen::Success)
            throw std::runtime_error("smallest_eig: factorization of A failed (A not SPD?)");
        Eigen::VectorXd x = random_matrix(1).col(0);
        double xbx = x.dot(B * x);
        if (xbx <= 0.0) throw std::runtime_error("non-SPD B detected");
        x /= std::sqrt(xbx);
        sigma = x.dot(A * x);
        for (int k = 0; k < opts.warmup_steps; ++k) {
            Eigen::VectorXd z = lltA.solve(B * x);
            const double zbz = z.dot(B * z);
            if (!(zbz > 0.0)) break;
            x = z / std::sqrt(zbz);
            sigma = std::min(sigma, x.dot(A * x));
        }
        warm_x = x;
    }

    // exact factorization of the shifted pencil; the thin-shell meshes are
    // only a few node layers thick, so the fill-in stays modest
    Eigen::SimplicialLDLT<SpMat> precond;
    {
        SpMat shifted = A + sigma * B;
        precond.compute(shifted);
        if (precond.info() != Eigen::Success)
            throw std::runtime_error("smallest_eig: factorization of A + sigma B failed");
    }

    EigReport rep;
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::MatrixXd X = random_matrix(block);
        if (attempt == 0) X.col(0) = warm_x;  // start from the warm-up iterate
        if (b_orthonormalize(X, B) < 1) continue;
        int m = static_cast<int>(X.cols());
        Eigen::MatrixXd P(n, 0);
        Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
        double last_lambda = std::numeric_limits<double>::infinity();
        bool restart = false;

        for (int iter = 1; iter <= opts.max_iter; ++iter) {
            // Rayleigh-Ritz over [X, W, P]; first pass is X alone
            Eigen::MatrixXd S(n, X.cols() + (iter > 1 ? X.cols() + P.cols() : 0));
            if (iter == 1) {
                S = X;
            } else {
                Eigen::MatrixXd R = A * X;
                Eigen::MatrixXd BX = B * X;
                for (int c = 0; c < X.cols(); ++c) R.col(c) -= lambda(c) * BX.col(c);
                Eigen::MatrixXd W(n, X.cols());
                for (int c = 0; c < X.cols(); ++c) W.col(c) = precond.solve(R.col(c));
                S.resize(n, X.cols() + W.cols() + P.cols());
                S << X, W, P;
            }
            const int kept = b_orthonormalize(S, B);
            if (kept < 1) {
                restart = true;
                break;
            }
            Eigen::MatrixXd Sa = S.transpose() * (A * S).eval();
            Sa = 0.5 * (Sa + Sa.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sa);
            if (es.info() != Eigen::Success || !es.eigenvalues().allFinite()) {
                restart = true;
                break;
            }
            m = std::min(block, kept);
            Eigen::MatrixXd C = es.eigenvectors().leftCols(m);
            Eigen::MatrixXd Xnew = S * C;
            lambda = es.eigenvalues().head(m);

            // direction block: contribution of everything beyond the previous X
            if (S.cols() > static_cast<int>(Xnew.cols()) && iter > 1) {
                const int tail = kept - std::min<int>(block, kept);
                if (tail > 0)
                    P = S.rightCols(tail) * C.bottomRows(tail);
            }
            X = Xnew;

            // Rayleigh quotients are non-increasing across iterations
            if (lambda(0) > last_lambda * (1.0 + 1e-9) + 1e-300) {
                restart = true;
                break;
            }
            last_lambda = lambda(0);

            Eigen::VectorXd x0 = X.col(0);
            Eigen::VectorXd ax = A * x0, bx = B * x0;
            Eigen::VectorXd r = ax - lambda(0) * bx;
            const double denom = ax.norm() + std::abs(lambda(0)) * bx.norm();
            const double relres = denom > 0.0 ? r.norm() / denom : r.norm();
            rep.lambda_min = lambda(0);
            rep.eigenvector = x0;
            rep.rel_residual = relres;
            rep.iterations = iter;
            if (relres <= opts.tol) {
                rep.converged = true;
                break;
            }
        }
        if (!restart || rep.converged) break;
        if (attempt == 1)
            throw std::runtime_error("smallest_eig: B-orthogonality breakdown after restart");
    }

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

PowerFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");
    const int n = static_cast<int>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [h, lam] : points) {
        if (!(h > 0.0) || !(lam > 0.0))
            throw std::invalid_argument("fit_exponent: inputs must be positive");
        const double x = std::log(h), y = std::log(lam);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw std::invalid_argument("fit_exponent: degenerate abscissae");
    PowerFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (const auto& [h, lam] : points) {
        const double r = std::log(lam) - (fit.intercept + fit.slope * std::log(h));
        ss += r * r;
    }
    fit.stderr_slope = (n > 2) ? std::sqrt(ss / (n - 2) * n / denom) : 0.0;
    return fit;
}

}  // namespace shellkorn
