#pragma once

#include <functional>
#include <vector>

#include "sjm/conditionals.hpp"
#include "sjm/kernel.hpp"
#include "sjm/rng.hpp"
#include "sjm/types.hpp"

namespace sjm {

enum class Block { Zeta, TauZ2, TauY2, MuY, MuZ, GammaY, GammaZ, L, Delta, PiLambda, XiEta };

/// Scan order of one sweep. `PiLambda` visits (pi_r, lambda_r) for every r
/// and `XiEta` visits (eta_v, xi_v) for every node.
struct SweepPlan {
    std::vector<Block> order;

    static SweepPlan standard();
    /// True when every block appears exactly once.
    bool complete() const;
};

/// Everything a sweep needs that stays fixed for a run.
struct SamplerContext {
    PreparedData data;
    Hyperparameters hyper;
    ModelVariant variant;
    SweepPlan plan = SweepPlan::standard();
    // One kernel per zeta grid point for spatial fits; a single identity
    // kernel otherwise.
    std::vector<KernelMatrix> kernels;

    const KernelMatrix& kernelFor(const ModelState& s) const;
};

/// Validates inputs and precomputes the grid kernels.
SamplerContext makeContext(const Dataset& data, const Hyperparameters& hyper,
                           const ModelVariant& variant = {});

/// Starting point: intercepts and gammas at 0, tau^2 at the sample variances
/// of y and z, Delta = 0.5, all nodes active with xi_v ~ N(0, 0.1 I),
/// lambda = 1, pi at its prior mean, zeta at the grid median.
ModelState initialState(const SamplerContext& ctx, Rng& rng);

/// Draw from the joint prior. Needs proper priors on intercepts and
/// auxiliary coefficients (positive precisions in the hyperparameters).
ModelState samplePrior(const Hyperparameters& hyper, int V, int q, Rng& rng);

/// One Gibbs scan in plan order.
ModelState sweep(const SamplerContext& ctx, ModelState state, Rng& rng);

using ProgressCallback = std::function<void(int iteration, const ModelState&)>;

/// Runs hyper.iterations sweeps from initialState and keeps the states after
/// hyper.burnin.
Chain runChain(const SamplerContext& ctx, Rng& rng, const ProgressCallback& progress = {});
Chain runChain(const Dataset& data, const Hyperparameters& hyper, Rng& rng,
               const ModelVariant& variant = {}, const ProgressCallback& progress = {});

}  // namespace sjm
