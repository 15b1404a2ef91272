#pragma once

#include <span>

#include "sjm/rng.hpp"
#include "sjm/types.hpp"

namespace sjm {

/// mean + covCholesky * eps with eps i.i.d. N(0, 1). `covCholesky` must be
/// lower triangular with a positive diagonal.
Vector mvnDraw(const Vector& mean, const Matrix& covCholesky, Rng& rng);

/// Draw from N(mean, cov), factorizing `cov` first.
Vector mvnDrawCov(const Vector& mean, const Matrix& cov, Rng& rng);

/// Inverse gamma with density proportional to x^{-shape-1} exp(-rate / x).
double invGammaDraw(double shape, double rate, Rng& rng);

/// Wishart(df, scale) via the Bartlett decomposition; df > dim - 1.
Matrix wishartDraw(double df, const Matrix& scale, Rng& rng);

/// Inverse-Wishart(df, scale), the inverse of Wishart(df, scale^{-1}).
/// Mean is scale / (df - dim - 1) when df > dim + 1.
Matrix invWishartDraw(double df, const Matrix& scale, Rng& rng);

Vector dirichletDraw(const Vector& alpha, Rng& rng);
double betaDraw(double a, double b, Rng& rng);
bool bernoulliDraw(double p, Rng& rng);

/// Probabilities from unnormalized log weights, normalized after subtracting
/// the maximum. Entries equal to -inf get probability zero. Throws if no
/// entry is finite or any entry is NaN or +inf.
Vector normalizeLogWeights(std::span<const double> logWeights);

/// Index drawn with probability proportional to exp(logWeights).
int categoricalDraw(std::span<const double> logWeights, Rng& rng);

/// Index drawn from a probability vector (entries sum to one).
int categoricalFromProbabilities(const Vector& probs, Rng& rng);

}  // namespace sjm
