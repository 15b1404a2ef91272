#pragma once

#include <cstdint>
#include <vector>

#include "sjm/kernel.hpp"
#include "sjm/rng.hpp"
#include "sjm/types.hpp"

namespace sjm {

/// One simulation setting: node sparsity, spatial scale and true parameters.
struct ScenarioConfig {
    int id = 0;
    double sparsity = 0.5;  // 1 - Delta*
    double zetaStar = 0.1;
    int n = 100;
    int V = 20;
    int q = 2;
    int Rstar = 4;
    double tauY2Star = 1.0;
    double tauZ2Star = 9.0;
    Vector gammaYStar = (Vector(2) << 0.2, 0.5).finished();
    Vector gammaZStar = (Vector(2) << 0.1, 0.4).finished();
    double muYStar = 0.0;
    double muZStar = 0.0;
    std::uint64_t seed = 1;

    double DeltaStar() const { return 1.0 - sparsity; }
};

void validateScenario(const ScenarioConfig& cfg);

/// The seven sparsity / spatial-scale combinations, ids 1..7.
std::vector<ScenarioConfig> builtinScenarios();

/// Scenario `id` (1-based) from builtinScenarios().
ScenarioConfig scenario(int id);

struct GroundTruth {
    IntVector etaStar;  // V
    Matrix xiStar;      // V x (Rstar+1), rows (alpha*(v), theta*(v)^T)
    Matrix Lstar;       // (Rstar+1) x (Rstar+1)
    Matrix betaStar;    // V x V
    Matrix coords;      // V x 3
    Matrix deltaStar;   // n x V spatial effects
    double zetaStar = 0.0;

    Vector alphaStar() const { return xiStar.col(0); }
};

constexpr int kMaxEtaResamples = 100;

/// Node indicators, latent effects, coordinates and spatial effects.
/// Redraws eta* when every node comes out inactive, up to kMaxEtaResamples
/// times before throwing.
GroundTruth generateTruth(const ScenarioConfig& cfg, Rng& rng);

/// Subject covariates and responses from the truth: x_i ~ N(0,1),
/// w_i ~ N(0, I_q), networks with N(0, tauY2*) edge noise, attributes with
/// the spatial effects deltaStar and no further noise.
Dataset generateDataset(const ScenarioConfig& cfg, const GroundTruth& truth, Rng& rng);

/// `m` new subjects from the same truth with their own spatial effects,
/// for held-out prediction.
Dataset generateSubjects(const ScenarioConfig& cfg, const GroundTruth& truth, int m, Rng& rng);

/// Responses for fixed covariates and coordinates given a model state:
/// edges with N(0, tauY2) noise and attributes with a fresh N(0, tauZ2 Sigma)
/// field drawn through `kernel`.
void regenerateResponses(Dataset& data, const ModelState& state, const KernelMatrix& kernel, Rng& rng);

}  // namespace sjm
