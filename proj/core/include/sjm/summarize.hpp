#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sjm/rng.hpp"
#include "sjm/types.hpp"

namespace sjm {

constexpr double kSelectionThreshold = 0.5;

/// Linear-interpolation quantile of sorted data (R type 7):
/// position (N-1) p between order statistics.
double quantileSorted(std::span<const double> sorted, double p);

/// Equal-tailed (level) interval of unsorted draws.
std::pair<double, double> equalTailedInterval(std::vector<double> draws, double level);

/// Initial-monotone-sequence effective sample size. A constant series has
/// ESS equal to its length.
double effectiveSampleSize(std::span<const double> series);

struct ScalarSummary {
    std::string name;
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double ess = 0.0;
};

struct PosteriorSummary {
    double level = 0.95;
    double threshold = kSelectionThreshold;
    int draws = 0;
    Vector inclusionProb;
    Matrix betaMean, betaLower, betaUpper;  // V x V, zero diagonal
    Vector alphaMean, alphaLower, alphaUpper;
    std::vector<ScalarSummary> scalars;
    std::vector<int> selectedNodes;  // inclusionProb > threshold
    std::vector<int> tiedNodes;      // inclusionProb == threshold, not selected
};

/// Mean of the stored eta draws per node.
Vector inclusionProbabilities(const Chain& chain);

/// Nodes with probability strictly above the threshold.
std::vector<int> selectNodes(const Vector& inclusionProb, double threshold = kSelectionThreshold);

/// Posterior means and equal-tailed intervals of beta (rebuilt per draw),
/// alpha and the scalar parameters, plus node selection.
PosteriorSummary coefficientSummary(const Chain& chain, double level = 0.95,
                                    double threshold = kSelectionThreshold);

enum class CurveOrder {
    SubjectFirst,  // correlation across draws within each subject, then averaged over subjects
    Pooled,        // correlation across all (draw, subject) pairs
};

struct CurveOptions {
    int bins = 15;
    CurveOrder order = CurveOrder::SubjectFirst;
    int minPairs = 2;
    std::optional<double> referenceZeta;
};

struct SpatialBin {
    double lower = 0.0;
    double upper = 0.0;
    double midpoint = 0.0;
    int count = 0;
    double correlation = 0.0;
    std::optional<double> reference;  // mean of exp(-zeta* d) over the bin's pairs
};

struct SpatialCurve {
    SpatialBin self;  // distance zero: each location with itself
    std::vector<SpatialBin> bins;
    std::vector<std::string> warnings;
};

/// Posterior predictive attribute fields for the observed subjects, one
/// n x V matrix per stored draw.
std::vector<Matrix> predictiveAttributeDraws(const Chain& chain, const Dataset& data, Rng& rng);

/// V x V empirical correlation of predictive draws between node pairs.
Matrix predictiveCorrelations(const std::vector<Matrix>& draws, CurveOrder order);

/// Averages pairwise correlations into equal-width distance bins spanning the
/// observed pairwise distances. Bins with fewer than minPairs pairs are dropped.
SpatialCurve binCorrelations(const Matrix& correlations, const Matrix& coords, const CurveOptions& opts);

SpatialCurve spatialCorrelationCurve(const Chain& chain, const Dataset& data, Rng& rng,
                                     const CurveOptions& opts = {});

/// Posterior mean of x * Delta * L_12^T, the covariance between the attribute
/// and the latent network vector at a node for predictor value x (length R).
Vector impliedCrossCovariance(const Chain& chain, double x);

struct Prediction {
    double level = 0.95;
    Matrix edgeMean, edgeLower, edgeUpper;  // m x h
    Matrix attrMean, attrLower, attrUpper;  // m x V
    // Per new subject, F x h and F x V draws; filled only when requested.
    std::vector<Matrix> edgeDraws, attrDraws;
};

/// Predictive draws for new subjects (predictor newX, auxiliaries newW)
/// including edge noise and a fresh spatial field per draw.
Prediction posteriorPredict(const Chain& chain, const Vector& newX, const Matrix& newW,
                            const Dataset& data, Rng& rng, double level = 0.95, bool keepDraws = false);

}  // namespace sjm
