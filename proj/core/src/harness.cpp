#include "sjm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "sjm/algebra.hpp"
#include "sjm/error.hpp"
#include "sjm/sampler.hpp"

namespace sjm {

double scaledMse(const Vector& estimate, const Vector& truth) {
    if (estimate.size() != truth.size()) throw InvalidInput("scaledMse: length mismatch");
    const double denom = truth.squaredNorm();
    if (!(denom > 0.0)) throw InvalidInput("scaledMse: truth has zero norm");
    return (estimate - truth).squaredNorm() / denom;
}

double scaledMseUpper(const Matrix& estimate, const Matrix& truth) {
    return scaledMse(vectorizeUpper(estimate), vectorizeUpper(truth));
}

IntervalMetrics intervalMetrics(const Vector& lower, const Vector& upper, const Vector& truth) {
    if (lower.size() != truth.size() || upper.size() != truth.size())
        throw InvalidInput("intervalMetrics: length mismatch");
    if (truth.size() == 0) throw InvalidInput("intervalMetrics: no entries");
    IntervalMetrics m;
    int inside = 0;
    for (Eigen::Index k = 0; k < truth.size(); ++k)
        if (lower(k) <= truth(k) && truth(k) <= upper(k)) ++inside;
    m.coverage = static_cast<double>(inside) / static_cast<double>(truth.size());
    m.meanLength = (upper - lower).mean();
    return m;
}

IntervalMetrics betaIntervalMetrics(const PosteriorSummary& s, const Matrix& betaStar) {
    return intervalMetrics(vectorizeUpper(s.betaLower), vectorizeUpper(s.betaUpper),
                           vectorizeUpper(betaStar));
}

IntervalMetrics alphaIntervalMetrics(const PosteriorSummary& s, const Vector& alphaStar) {
    return intervalMetrics(s.alphaLower, s.alphaUpper, alphaStar);
}

SelectionRates selectionRates(const Vector& prob, const IntVector& etaStar, double threshold) {
    if (prob.size() != etaStar.size()) throw InvalidInput("selectionRates: length mismatch");
    int active = 0, inactive = 0, tp = 0, fp = 0;
    for (Eigen::Index v = 0; v < prob.size(); ++v) {
        const bool selected = prob(v) > threshold;
        if (etaStar(v) == 1) {
            ++active;
            tp += selected;
        } else {
            ++inactive;
            fp += selected;
        }
    }
    SelectionRates r;
    r.truePositive = active ? static_cast<double>(tp) / active : 0.0;
    r.falsePositive = inactive ? static_cast<double>(fp) / inactive : 0.0;
    return r;
}

std::uint64_t dataStream(int scenarioId, int replicate) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(scenarioId)) << 32) |
           (2ULL * static_cast<std::uint32_t>(replicate));
}
std::uint64_t fitStream(int scenarioId, int replicate) { return dataStream(scenarioId, replicate) + 1; }

namespace {

Chain fit(const Dataset& data, const ExperimentOptions& opts, VariantKind kind, std::uint64_t seed,
          std::uint64_t stream) {
    Rng rng(seed, stream);
    return runChain(data, opts.hyper, rng, ModelVariant{kind});
}

VariantResult fitVariant(const Dataset& data, const GroundTruth& truth, const ExperimentOptions& opts,
                         VariantKind kind, std::uint64_t seed, std::uint64_t stream) {
    VariantResult res;
    res.kind = kind;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Chain primary = fit(data, opts, kind, seed, stream);
        const PosteriorSummary ps = coefficientSummary(primary, opts.level);
        res.inclusionProb = ps.inclusionProb;
        res.selection = selectionRates(ps.inclusionProb, truth.etaStar);
        res.mseBeta = scaledMseUpper(ps.betaMean, truth.betaStar);
        res.betaInterval = betaIntervalMetrics(ps, truth.betaStar);

        PosteriorSummary alphaSummary = ps;
        if (kind == VariantKind::IndependentNetwork) {
            const Chain attr = fit(data, opts, VariantKind::IndependentAttribute, seed, stream);
            alphaSummary = coefficientSummary(attr, opts.level);
        }
        res.mseAlpha = scaledMse(alphaSummary.alphaMean, truth.alphaStar());
        res.alphaInterval = alphaIntervalMetrics(alphaSummary, truth.alphaStar());
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    res.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

MetricAggregate meanAndSe(const std::vector<double>& xs) {
    MetricAggregate m;
    m.count = static_cast<int>(xs.size());
    if (xs.empty()) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return m;
}

}  // namespace

ReplicateResult runReplicate(const ScenarioConfig& cfg, const ExperimentOptions& opts, int replicate) {
    ReplicateResult out;
    out.replicate = replicate;
    Rng dataRng(cfg.seed, dataStream(cfg.id, replicate));
    GroundTruth truth;
    Dataset data;
    try {
        truth = generateTruth(cfg, dataRng);
        data = generateDataset(cfg, truth, dataRng);
    } catch (const std::exception& e) {
        for (VariantKind k : opts.variants) {
            VariantResult r;
            r.kind = k;
            r.error = std::string("data generation failed: ") + e.what();
            out.variants.push_back(std::move(r));
        }
        return out;
    }
    out.etaStar = truth.etaStar;
    for (VariantKind k : opts.variants)
        out.variants.push_back(fitVariant(data, truth, opts, k, cfg.seed, fitStream(cfg.id, replicate)));
    return out;
}

std::vector<VariantAggregate> aggregate(const std::vector<ReplicateResult>& replicates,
                                        const std::vector<VariantKind>& variants) {
    std::vector<VariantAggregate> out;
    for (std::size_t k = 0; k < variants.size(); ++k) {
        VariantAggregate agg;
        agg.kind = variants[k];
        std::vector<double> mb, ma, cb, lb, ca, la, tp, fp;
        for (const auto& rep : replicates) {
            const VariantResult& r = rep.variants.at(k);
            if (!r.ok) {
                ++agg.failed;
                continue;
            }
            ++agg.succeeded;
            mb.push_back(r.mseBeta);
            ma.push_back(r.mseAlpha);
            cb.push_back(r.betaInterval.coverage);
            lb.push_back(r.betaInterval.meanLength);
            ca.push_back(r.alphaInterval.coverage);
            la.push_back(r.alphaInterval.meanLength);
            tp.push_back(r.selection.truePositive);
            fp.push_back(r.selection.falsePositive);
        }
        agg.mseBeta = meanAndSe(mb);
        agg.mseAlpha = meanAndSe(ma);
        agg.coverageBeta = meanAndSe(cb);
        agg.lengthBeta = meanAndSe(lb);
        agg.coverageAlpha = meanAndSe(ca);
        agg.lengthAlpha = meanAndSe(la);
        agg.truePositive = meanAndSe(tp);
        agg.falsePositive = meanAndSe(fp);
        out.push_back(agg);
    }
    return out;
}

ReplicateReport runScenario(const ScenarioConfig& cfg, const ExperimentOptions& opts) {
    validateScenario(cfg);
    if (opts.replicates < 1) throw InvalidInput("replicate count must be positive");
    if (opts.variants.empty()) throw InvalidInput("no model variants requested");

    ReplicateReport report;
    report.scenario = cfg;
    report.variants = opts.variants;
    report.replicates.resize(static_cast<std::size_t>(opts.replicates));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < opts.replicates; r = next++)
            report.replicates[static_cast<std::size_t>(r)] = runReplicate(cfg, opts, r);
    };
    const int threads = std::max(1, std::min(opts.parallelism, opts.replicates));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    report.aggregates = aggregate(report.replicates, opts.variants);
    return report;
}

}  // namespace sjm
