#pragma once

#include <vector>

#include "sjm/types.hpp"

namespace sjm {

/// Exponential-kernel correlation matrix exp(-zeta ||s_u - s_v||) with its
/// Cholesky factor, inverse and log-determinant cached.
struct KernelMatrix {
    double zeta = 0.0;
    double jitter = 0.0;  // diagonal loading actually applied
    Matrix Sigma;
    Matrix cholesky;   // lower triangular, cholesky * cholesky^T = Sigma
    Matrix precision;  // Sigma^{-1}
    double logdet = 0.0;
    double onesPrecisionOnes = 0.0;  // 1^T Sigma^{-1} 1
    Vector precisionOnes;            // Sigma^{-1} 1

    int size() const { return static_cast<int>(Sigma.rows()); }
};

constexpr double kMaxJitter = 1e-4;

/// Pairwise Euclidean distances between rows of `coords`.
Matrix pairwiseDistances(const Matrix& coords);

/// Builds the kernel at `zeta`. Starts at `jitter` and escalates x10 up to
/// kMaxJitter if the factorization fails; throws NumericalError after that.
KernelMatrix kernelMatrix(const Matrix& coords, double zeta, double jitter = 1e-8);

/// Identity correlation, used by variants without a spatial field.
KernelMatrix identityKernel(int V);

/// Kernel for every grid point, in grid order.
std::vector<KernelMatrix> gridKernels(const Matrix& coords, const std::vector<double>& grid,
                                      double jitter = 1e-8);

}  // namespace sjm
