#pragma once

#include <array>
#include <vector>

#include "sjm/kernel.hpp"
#include "sjm/types.hpp"

namespace sjm {

/// Dataset rearranged for the sampler: networks stacked as n x h edge rows,
/// plus quantities that never change during a run.
struct PreparedData {
    int n = 0;
    int V = 0;
    int q = 0;
    int h = 0;
    Matrix Y;     // n x h
    Matrix Z;     // n x V
    Vector x;     // n
    Matrix W;     // n x q
    Matrix gram;  // sum_i w_i w_i^T
    double sumX2 = 0.0;
    std::vector<std::vector<int>> incident;  // incidentEdges(v, V) per node
};

PreparedData prepare(const Dataset& data);

struct NormalParams {
    double mean = 0.0;
    double variance = 0.0;
};

struct GaussianParams {
    Vector mean;
    Matrix cov;
};

struct InvGammaParams {
    double shape = 0.0;
    double rate = 0.0;
};

struct BetaParams {
    double alpha = 0.0;
    double beta = 0.0;
};

struct InvWishartParams {
    double df = 0.0;
    Matrix scale;
};

/// Candidate order used by the lambda conditional and the pi triples.
constexpr std::array<int, 3> kLambdaValues{0, 1, -1};

// Network block -----------------------------------------------------------

NormalParams condMuY(const PreparedData& d, const ModelState& s, const Hyperparameters& h);
GaussianParams condGammaY(const PreparedData& d, const ModelState& s, const Hyperparameters& h);
InvGammaParams condTauY2(const PreparedData& d, const ModelState& s, const Hyperparameters& h);

/// Log-likelihood of all network data (up to a constant shared by the three
/// candidates) with lambda_r set to 0, 1, -1 in turn. `r` is 0-based.
std::array<double, 3> lambdaLogLikelihoods(int r, const PreparedData& d, const ModelState& s);

/// P(lambda_r = 0, 1, -1 | rest).
Vector condLambdaR(int r, const PreparedData& d, const ModelState& s);

/// Dirichlet concentration for pi_r: ((r+1)^xi + 1[lambda_r = 0], 1 + 1[lambda_r = 1],
/// 1 + 1[lambda_r = -1]) with 0-based `r`.
Vector condPiR(int r, const ModelState& s, const Hyperparameters& h);

// Attribute block ---------------------------------------------------------

NormalParams condMuZ(const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                     const KernelMatrix& kernel);
GaussianParams condGammaZ(const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                          const KernelMatrix& kernel);
InvGammaParams condTauZ2(const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                         const KernelMatrix& kernel);

/// P(zeta = grid value l | rest) for every precomputed grid kernel.
Vector condZeta(const PreparedData& d, const ModelState& s, const std::vector<KernelMatrix>& kernels);

// Shared blocks -----------------------------------------------------------

BetaParams condDelta(const ModelState& s, const Hyperparameters& h);
InvWishartParams condL(const ModelState& s, const Hyperparameters& h);

/// Gaussian slab system for node v with xi_v integrated against N(0, L).
///
/// The stacked per-node data f = A xi_v + e, e ~ N(0, D) with D diagonal,
/// is summarized by precision = L^{-1} + A^T D^{-1} A and rhs = A^T D^{-1} f.
/// The slab posterior is N(precision^{-1} rhs, precision^{-1}) and
/// logBayesFactor = log N(f | 0, A L A^T + D) - log N(f | 0, D), evaluated
/// with the determinant lemma and Woodbury identity on the (R+1)-dim core.
struct SlabSystem {
    Matrix precision;
    Vector rhs;
    Matrix cov;
    Vector mean;
    double logBayesFactor = 0.0;
};

SlabSystem slabSystem(int v, const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                      const KernelMatrix& kernel, const ModelVariant& variant = {});

/// Slab parameters of xi_v (the eta_v = 1 branch).
GaussianParams condXiV(int v, const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                       const KernelMatrix& kernel, const ModelVariant& variant = {});

/// P(eta_v = 1 | rest) with xi_v integrated out.
double condEtaV(int v, const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                const KernelMatrix& kernel, const ModelVariant& variant = {});

/// Inclusion probability from Delta and a log Bayes factor, in log space.
double inclusionProbability(double Delta, double logBayesFactor);

}  // namespace sjm
