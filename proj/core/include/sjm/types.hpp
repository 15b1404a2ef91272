#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sjm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

/// Multi-subject network and nodal-attribute data over a shared node set.
///
/// Networks are undirected with zero diagonal. Row i of `attributes`,
/// `auxiliaries` and entry i of `predictor` belong to subject i. Row v of
/// `coords` is the 3-D location of node v.
struct Dataset {
    int n = 0;
    int V = 0;
    int q = 0;
    std::vector<Matrix> networks;  // n matrices, V x V
    Matrix attributes;             // n x V
    Vector predictor;              // n
    Matrix auxiliaries;            // n x q
    Matrix coords;                 // V x 3
};

/// How the attribute row of the per-node slab system is formed.
///
/// `Independent` uses the raw attribute residual at node v with variance
/// tau_z^2, ignoring spatial correlation with the other nodes.
/// `Whitened` conditions on the attribute residuals at the other nodes under
/// N(0, tau_z^2 Sigma), which is the exact full conditional.
enum class AttributeUpdate { Whitened, Independent };

/// Chain starting point for the latent effects.
///
/// `Prior` starts with lambda = 1 and small random xi. `Spectral` takes
/// lambda and theta from the leading eigenpairs of the per-edge least-squares
/// slopes and alpha from per-node slopes, so burn-in does not have to find
/// the sign pattern of lambda on its own.
enum class Initialization { Spectral, Prior };

struct Hyperparameters {
    int R = 5;
    double xiExp = 2.0;
    double a = 2.0;
    double b = 1.0;
    double nu = 7.0;  // R + 2
    Matrix SigmaL = Matrix::Identity(6, 6);
    double aDelta = 1.0;
    double bDelta = 1.0;
    std::vector<double> zetaGrid;
    int iterations = 500;
    int burnin = 200;
    std::uint64_t seed = 1;

    // Sampler settings.
    double jitter = 1e-8;
    AttributeUpdate attributeUpdate = AttributeUpdate::Whitened;
    Initialization initialization = Initialization::Spectral;
    // Prior precision on mu_y, mu_z and on each gamma entry. Zero is the
    // flat prior; positive values give N(0, 1/precision).
    double interceptPrecision = 0.0;
    double auxPrecision = 0.0;

    /// Defaults with rank R: nu = R + 2, SigmaL = I, 20-point zeta grid on [0.01, 1].
    static Hyperparameters defaults(int R = 5);
};

/// One point in parameter space.
struct ModelState {
    double muY = 0.0;
    double muZ = 0.0;
    Vector gammaY;  // q
    Vector gammaZ;  // q
    double tauY2 = 1.0;
    double tauZ2 = 1.0;
    double Delta = 0.5;
    Matrix L;          // (R+1) x (R+1)
    IntVector lambda;  // R, entries in {-1, 0, 1}
    Matrix pi;         // R x 3, columns ordered (lambda=0, lambda=1, lambda=-1)
    IntVector eta;     // V, binary
    Matrix xi;         // V x (R+1); row v = (alpha(v), theta(v)^T)
    double zeta = 0.0;
    int zetaIndex = 0;

    int rank() const { return static_cast<int>(lambda.size()); }
    int nodes() const { return static_cast<int>(eta.size()); }
    double alpha(int v) const { return xi(v, 0); }
    Vector alphaVector() const { return xi.col(0); }
    Matrix theta() const { return xi.rightCols(xi.cols() - 1); }
};

enum class VariantKind { SpatialJoint, NonSpatialJoint, IndependentNetwork, IndependentAttribute };

/// Which likelihood blocks a fit uses and whether the attribute field is spatial.
struct ModelVariant {
    VariantKind kind = VariantKind::SpatialJoint;

    bool usesNetwork() const { return kind != VariantKind::IndependentAttribute; }
    bool usesAttribute() const { return kind != VariantKind::IndependentNetwork; }
    bool spatial() const { return kind == VariantKind::SpatialJoint; }
};

std::string variantName(VariantKind kind);
VariantKind parseVariant(const std::string& name);

/// Post-burn-in draws of one chain plus provenance.
struct Chain {
    std::vector<ModelState> states;
    Hyperparameters hyper;
    ModelVariant variant;
    std::uint64_t streamId = 0;
    std::string datasetFingerprint;
    double wallClock = 0.0;  // seconds; not part of persisted draws
};

}  // namespace sjm
