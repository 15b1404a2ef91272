#include "sjm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sjm/error.hpp"

namespace sjm {

Vector mvnDraw(const Vector& mean, const Matrix& covCholesky, Rng& rng) {
    const Eigen::Index d = mean.size();
    if (covCholesky.rows() != d || covCholesky.cols() != d)
        throw InvalidInput("mvnDraw: Cholesky factor has the wrong shape");
    for (Eigen::Index k = 0; k < d; ++k) {
        if (!(covCholesky(k, k) > 0.0))
            throw InvalidInput("mvnDraw: Cholesky factor needs a positive diagonal");
    }
    Vector eps(d);
    for (Eigen::Index k = 0; k < d; ++k) eps(k) = rng.normal();
    return mean + covCholesky.triangularView<Eigen::Lower>() * eps;
}

Vector mvnDrawCov(const Vector& mean, const Matrix& cov, Rng& rng) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NumericalError("covariance matrix is not positive definite");
    return mvnDraw(mean, llt.matrixL(), rng);
}

double invGammaDraw(double shape, double rate, Rng& rng) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw InvalidInput("invGammaDraw: shape and rate must be positive");
    double g = 0.0;
    while (!(g > 0.0)) g = rng.gamma(shape);
    return rate / g;
}

Matrix wishartDraw(double df, const Matrix& scale, Rng& rng) {
    const Eigen::Index d = scale.rows();
    if (scale.cols() != d || d == 0) throw InvalidInput("wishartDraw: scale must be square");
    if (!(df > static_cast<double>(d) - 1.0))
        throw InvalidInput("wishartDraw: degrees of freedom must exceed dim - 1");
    Eigen::LLT<Matrix> llt(scale);
    if (llt.info() != Eigen::Success)
        throw InvalidInput("wishartDraw: scale must be symmetric positive definite");
    Matrix A = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        // chi-square with df - i degrees of freedom
        A(i, i) = std::sqrt(2.0 * rng.gamma(0.5 * (df - static_cast<double>(i))));
        for (Eigen::Index j = 0; j < i; ++j) A(i, j) = rng.normal();
    }
    const Matrix CA = llt.matrixL() * A;
    Matrix W = CA * CA.transpose();
    return 0.5 * (W + W.transpose());
}

Matrix invWishartDraw(double df, const Matrix& scale, Rng& rng) {
    const Eigen::Index d = scale.rows();
    if (scale.cols() != d || d == 0) throw InvalidInput("invWishartDraw: scale must be square");
    Eigen::LLT<Matrix> llt(scale);
    if (llt.info() != Eigen::Success)
        throw InvalidInput("invWishartDraw: scale must be symmetric positive definite");
    const Matrix scaleInv = llt.solve(Matrix::Identity(d, d));
    const Matrix W = wishartDraw(df, 0.5 * (scaleInv + scaleInv.transpose()), rng);
    Eigen::LLT<Matrix> wl(W);
    if (wl.info() != Eigen::Success) throw NumericalError("invWishartDraw: singular Wishart draw");
    Matrix out = wl.solve(Matrix::Identity(d, d));
    return 0.5 * (out + out.transpose());
}

Vector dirichletDraw(const Vector& alpha, Rng& rng) {
    if (alpha.size() == 0) throw InvalidInput("dirichletDraw: empty concentration");
    if ((alpha.array() <= 0.0).any() || !alpha.allFinite())
        throw InvalidInput("dirichletDraw: concentrations must be positive");
    Vector g(alpha.size());
    double total = 0.0;
    while (!(total > 0.0)) {
        for (Eigen::Index k = 0; k < alpha.size(); ++k) g(k) = rng.gamma(alpha(k));
        total = g.sum();
    }
    Vector out = g / total;
    // Put the rounding residue on the largest component so the sum is exactly one.
    Eigen::Index big = 0;
    out.maxCoeff(&big);
    double rest = 0.0;
    for (Eigen::Index k = 0; k < out.size(); ++k)
        if (k != big) rest += out(k);
    out(big) = 1.0 - rest;
    return out;
}

double betaDraw(double a, double b, Rng& rng) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("betaDraw: parameters must be positive");
    while (true) {
        const double x = rng.gamma(a);
        const double y = rng.gamma(b);
        if (x + y > 0.0) return x / (x + y);
    }
}

bool bernoulliDraw(double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("bernoulliDraw: probability outside [0, 1]");
    return rng.uniform() < p;
}

Vector normalizeLogWeights(std::span<const double> logWeights) {
    if (logWeights.empty()) throw InvalidInput("no log-weights given");
    double top = -std::numeric_limits<double>::infinity();
    for (double w : logWeights) {
        if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
            throw InvalidInput("log-weights must be finite or -inf");
        top = std::max(top, w);
    }
    if (!std::isfinite(top)) throw InvalidInput("all log-weights are -inf");
    Vector p(static_cast<Eigen::Index>(logWeights.size()));
    for (std::size_t k = 0; k < logWeights.size(); ++k) p(k) = std::exp(logWeights[k] - top);
    return p / p.sum();
}

int categoricalFromProbabilities(const Vector& probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    int last = 0;
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
        if (probs(k) <= 0.0) continue;
        acc += probs(k);
        last = static_cast<int>(k);
        if (u < acc) return last;
    }
    return last;
}

int categoricalDraw(std::span<const double> logWeights, Rng& rng) {
    return categoricalFromProbabilities(normalizeLogWeights(logWeights), rng);
}

}  // namespace sjm
