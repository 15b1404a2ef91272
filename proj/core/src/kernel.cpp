#include "sjm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sjm/error.hpp"

namespace sjm {

namespace {

KernelMatrix finish(Matrix Sigma, double zeta, double jitter, const Eigen::LLT<Matrix>& llt) {
    KernelMatrix k;
    k.zeta = zeta;
    k.jitter = jitter;
    k.cholesky = llt.matrixL();
    k.logdet = 2.0 * k.cholesky.diagonal().array().log().sum();
    const int V = static_cast<int>(Sigma.rows());
    k.precision = llt.solve(Matrix::Identity(V, V));
    k.precision = 0.5 * (k.precision + k.precision.transpose()).eval();
    k.precisionOnes = k.precision.rowwise().sum();
    k.onesPrecisionOnes = k.precisionOnes.sum();
    k.Sigma = std::move(Sigma);
    return k;
}

}  // namespace

Matrix pairwiseDistances(const Matrix& coords) {
    const int V = static_cast<int>(coords.rows());
    Matrix D = Matrix::Zero(V, V);
    for (int u = 0; u < V; ++u) {
        for (int v = u + 1; v < V; ++v) {
            const double d = (coords.row(u) - coords.row(v)).norm();
            D(u, v) = d;
            D(v, u) = d;
        }
    }
    return D;
}

KernelMatrix kernelMatrix(const Matrix& coords, double zeta, double jitter) {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) {
        throw InvalidInput("kernel scale zeta must be positive and finite");
    }
    if (jitter < 0.0) throw InvalidInput("kernel jitter must be non-negative");
    const Matrix D = pairwiseDistances(coords);
    const Matrix base = (-zeta * D.array()).exp().matrix();
    const int V = static_cast<int>(base.rows());

    double j = jitter;
    while (true) {
        Matrix Sigma = base;
        Sigma.diagonal().array() += j;
        Eigen::LLT<Matrix> llt(Sigma);
        if (llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0).all()) {
            return finish(std::move(Sigma), zeta, j, llt);
        }
        if (j >= kMaxJitter) break;
        j = (j == 0.0) ? 1e-8 : std::min(j * 10.0, kMaxJitter);
    }

    Eigen::SelfAdjointEigenSolver<Matrix> eig(base, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    std::ostringstream msg;
    msg << "exponential kernel at zeta = " << zeta << " is not positive definite after jitter "
        << kMaxJitter << " (eigenvalue range [" << lo << ", " << hi << "], condition estimate "
        << (lo > 0 ? hi / lo : INFINITY) << ", V = " << V << ")";
    throw NumericalError(msg.str());
}

KernelMatrix identityKernel(int V) {
    Matrix I = Matrix::Identity(V, V);
    Eigen::LLT<Matrix> llt(I);
    return finish(std::move(I), 0.0, 0.0, llt);
}

std::vector<KernelMatrix> gridKernels(const Matrix& coords, const std::vector<double>& grid,
                                      double jitter) {
    std::vector<KernelMatrix> out;
    out.reserve(grid.size());
    for (double z : grid) out.push_back(kernelMatrix(coords, z, jitter));
    return out;
}

}  // namespace sjm
