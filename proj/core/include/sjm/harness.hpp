#pragma once

#include <string>
#include <vector>

#include "sjm/simulate.hpp"
#include "sjm/summarize.hpp"
#include "sjm/types.hpp"

namespace sjm {

/// ||estimate - truth||^2 / ||truth||^2. Throws InvalidInput when truth is zero.
double scaledMse(const Vector& estimate, const Vector& truth);

/// scaledMse over the upper triangle of symmetric matrices.
double scaledMseUpper(const Matrix& estimate, const Matrix& truth);

struct IntervalMetrics {
    double coverage = 0.0;
    double meanLength = 0.0;
};

/// Fraction of truth entries inside [lower, upper] and mean interval width.
IntervalMetrics intervalMetrics(const Vector& lower, const Vector& upper, const Vector& truth);
IntervalMetrics betaIntervalMetrics(const PosteriorSummary& summary, const Matrix& betaStar);
IntervalMetrics alphaIntervalMetrics(const PosteriorSummary& summary, const Vector& alphaStar);

/// Selection rates against the true indicators: share of active nodes
/// selected, and share of inactive nodes selected.
struct SelectionRates {
    double truePositive = 0.0;
    double falsePositive = 0.0;
};
SelectionRates selectionRates(const Vector& inclusionProb, const IntVector& etaStar,
                              double threshold = kSelectionThreshold);

/// One fitted variant within one replicate.
///
/// For IndependentNetwork the network fit supplies beta, selection and
/// inclusion probabilities and a paired IndependentAttribute fit supplies alpha.
struct VariantResult {
    VariantKind kind = VariantKind::SpatialJoint;
    bool ok = false;
    std::string error;
    double mseBeta = 0.0;
    double mseAlpha = 0.0;
    IntervalMetrics betaInterval;
    IntervalMetrics alphaInterval;
    Vector inclusionProb;
    SelectionRates selection;
    double runtime = 0.0;  // seconds; excluded from persisted reports
};

struct ReplicateResult {
    int replicate = 0;
    IntVector etaStar;
    std::vector<VariantResult> variants;
};

struct MetricAggregate {
    double mean = 0.0;
    double se = 0.0;
    int count = 0;
};

struct VariantAggregate {
    VariantKind kind = VariantKind::SpatialJoint;
    int succeeded = 0;
    int failed = 0;
    MetricAggregate mseBeta, mseAlpha;
    MetricAggregate coverageBeta, lengthBeta, coverageAlpha, lengthAlpha;
    MetricAggregate truePositive, falsePositive;
};

struct ReplicateReport {
    ScenarioConfig scenario;
    std::vector<VariantKind> variants;
    std::vector<ReplicateResult> replicates;  // sorted by replicate id
    std::vector<VariantAggregate> aggregates;
};

struct ExperimentOptions {
    Hyperparameters hyper = Hyperparameters::defaults();
    std::vector<VariantKind> variants{VariantKind::SpatialJoint, VariantKind::NonSpatialJoint,
                                      VariantKind::IndependentNetwork};
    int replicates = 5;
    int parallelism = 1;
    double level = 0.95;
};

/// Stream ids for data generation and model fitting of one replicate of a
/// scenario. Distinct scenarios and replicates never share a stream.
std::uint64_t dataStream(int scenarioId, int replicate);
std::uint64_t fitStream(int scenarioId, int replicate);

/// Simulates one replicate from cfg.seed and fits every requested variant.
ReplicateResult runReplicate(const ScenarioConfig& cfg, const ExperimentOptions& opts, int replicate);

/// Replicates run on up to `parallelism` threads; results depend only on
/// cfg.seed and the replicate count.
ReplicateReport runScenario(const ScenarioConfig& cfg, const ExperimentOptions& opts);

/// Means and standard errors over successful replicates.
std::vector<VariantAggregate> aggregate(const std::vector<ReplicateResult>& replicates,
                                        const std::vector<VariantKind>& variants);

}  // namespace sjm
