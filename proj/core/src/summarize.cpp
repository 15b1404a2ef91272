#include "sjm/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "sjm/algebra.hpp"
#include "sjm/error.hpp"
#include "sjm/kernel.hpp"

namespace sjm {

double quantileSorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("quantile level outside [0, 1]");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || lo == hi) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> equalTailedInterval(std::vector<double> draws, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidInput("interval level must lie in (0, 1)");
    std::sort(draws.begin(), draws.end());
    const double tail = 0.5 * (1.0 - level);
    return {quantileSorted(draws, tail), quantileSorted(draws, 1.0 - tail)};
}

double effectiveSampleSize(std::span<const double> x) {
    const std::size_t N = x.size();
    if (N < 4) return static_cast<double>(N);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(N);
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t t = 0; t + lag < N; ++t) s += (x[t] - mean) * (x[t + lag] - mean);
        return s / static_cast<double>(N);
    };
    const double c0 = autocov(0);
    if (!(c0 > 0.0)) return static_cast<double>(N);

    // Geyer: sum consecutive autocorrelation pairs while positive, forced monotone.
    double sum = 0.0;
    double prevPair = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; 2 * m + 1 < N; ++m) {
        double pair = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
        if (pair <= 0.0) break;
        pair = std::min(pair, prevPair);
        sum += pair;
        prevPair = pair;
    }
    const double tau = -1.0 + 2.0 * sum;
    return static_cast<double>(N) / std::max(tau, 1.0 / static_cast<double>(N));
}

Vector inclusionProbabilities(const Chain& chain) {
    if (chain.states.empty()) throw InvalidInput("chain has no stored draws");
    Vector p = Vector::Zero(chain.states.front().nodes());
    for (const auto& s : chain.states) p += s.eta.cast<double>();
    return p / static_cast<double>(chain.states.size());
}

std::vector<int> selectNodes(const Vector& probs, double threshold) {
    std::vector<int> out;
    for (Eigen::Index v = 0; v < probs.size(); ++v)
        if (probs(v) > threshold) out.push_back(static_cast<int>(v));
    return out;
}

namespace {

ScalarSummary summarizeSeries(std::string name, const std::vector<double>& series, double level) {
    ScalarSummary s;
    s.name = std::move(name);
    s.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
    std::tie(s.lower, s.upper) = equalTailedInterval(series, level);
    s.ess = effectiveSampleSize(series);
    return s;
}

}  // namespace

PosteriorSummary coefficientSummary(const Chain& chain, double level, double threshold) {
    if (chain.states.empty()) throw InvalidInput("chain has no stored draws");
    const std::size_t F = chain.states.size();
    const int V = chain.states.front().nodes();
    const int q = static_cast<int>(chain.states.front().gammaY.size());

    PosteriorSummary out;
    out.level = level;
    out.threshold = threshold;
    out.draws = static_cast<int>(F);
    out.inclusionProb = inclusionProbabilities(chain);
    out.selectedNodes = selectNodes(out.inclusionProb, threshold);
    for (int v = 0; v < V; ++v)
        if (out.inclusionProb(v) == threshold) out.tiedNodes.push_back(v);

    const int h = edgeCount(V);
    Matrix betaDraws(static_cast<Eigen::Index>(F), h);
    Matrix alphaDraws(static_cast<Eigen::Index>(F), V);
    for (std::size_t f = 0; f < F; ++f) {
        const auto& s = chain.states[f];
        betaDraws.row(static_cast<Eigen::Index>(f)) = betaUpper(s.lambda, s.xi).transpose();
        alphaDraws.row(static_cast<Eigen::Index>(f)) = s.xi.col(0).transpose();
    }

    auto columnSummary = [&](const Matrix& draws, Vector& mean, Vector& lower, Vector& upper) {
        const auto cols = draws.cols();
        mean.resize(cols);
        lower.resize(cols);
        upper.resize(cols);
        std::vector<double> col(F);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (std::size_t f = 0; f < F; ++f) col[f] = draws(static_cast<Eigen::Index>(f), c);
            mean(c) = draws.col(c).mean();
            std::tie(lower(c), upper(c)) = equalTailedInterval(col, level);
        }
    };

    Vector bm, bl, bu;
    columnSummary(betaDraws, bm, bl, bu);
    out.betaMean = devectorizeUpper(bm, V);
    out.betaLower = devectorizeUpper(bl, V);
    out.betaUpper = devectorizeUpper(bu, V);
    columnSummary(alphaDraws, out.alphaMean, out.alphaLower, out.alphaUpper);

    std::map<std::string, std::vector<double>> series;
    std::vector<std::string> order{"mu_y", "mu_z"};
    for (int j = 0; j < q; ++j) order.push_back("gamma_y[" + std::to_string(j) + "]");
    for (int j = 0; j < q; ++j) order.push_back("gamma_z[" + std::to_string(j) + "]");
    order.insert(order.end(), {"tau2_y", "tau2_z", "Delta", "zeta"});
    for (const auto& s : chain.states) {
        series["mu_y"].push_back(s.muY);
        series["mu_z"].push_back(s.muZ);
        for (int j = 0; j < q; ++j) {
            series["gamma_y[" + std::to_string(j) + "]"].push_back(s.gammaY(j));
            series["gamma_z[" + std::to_string(j) + "]"].push_back(s.gammaZ(j));
        }
        series["tau2_y"].push_back(s.tauY2);
        series["tau2_z"].push_back(s.tauZ2);
        series["Delta"].push_back(s.Delta);
        series["zeta"].push_back(s.zeta);
    }
    for (const auto& name : order) out.scalars.push_back(summarizeSeries(name, series[name], level));
    return out;
}

namespace {

class KernelCache {
public:
    KernelCache(const Chain& chain, const Dataset& data) : chain_(chain), data_(data) {}

    const Matrix& cholesky(const ModelState& s) {
        const int key = chain_.variant.spatial() ? s.zetaIndex : -1;
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            const KernelMatrix k = key < 0 ? identityKernel(data_.V)
                                           : kernelMatrix(data_.coords, s.zeta, chain_.hyper.jitter);
            it = cache_.emplace(key, k.cholesky).first;
        }
        return it->second;
    }

private:
    const Chain& chain_;
    const Dataset& data_;
    std::map<int, Matrix> cache_;
};

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sab += (a[k] - ma) * (b[k] - mb);
        saa += (a[k] - ma) * (a[k] - ma);
        sbb += (b[k] - mb) * (b[k] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

std::vector<Matrix> predictiveAttributeDraws(const Chain& chain, const Dataset& data, Rng& rng) {
    if (chain.states.empty()) throw InvalidInput("chain has no stored draws");
    KernelCache kernels(chain, data);
    std::vector<Matrix> out;
    out.reserve(chain.states.size());
    Vector eps(data.V);
    for (const auto& s : chain.states) {
        const Matrix& chol = kernels.cholesky(s);
        const double sd = std::sqrt(s.tauZ2);
        Matrix Z(data.n, data.V);
        for (int i = 0; i < data.n; ++i) {
            for (int v = 0; v < data.V; ++v) eps(v) = rng.normal();
            const double shift = s.muZ + (data.q ? data.auxiliaries.row(i).dot(s.gammaZ) : 0.0);
            Z.row(i) = (sd * (chol * eps)).transpose();
            for (int v = 0; v < data.V; ++v) Z(i, v) += shift + s.xi(v, 0) * data.predictor(i);
        }
        out.push_back(std::move(Z));
    }
    return out;
}

Matrix predictiveCorrelations(const std::vector<Matrix>& draws, CurveOrder order) {
    if (draws.empty()) throw InvalidInput("no predictive draws");
    const auto F = draws.size();
    const auto n = draws.front().rows();
    const auto V = draws.front().cols();
    Matrix C = Matrix::Identity(V, V);
    std::vector<double> a, b;
    for (Eigen::Index u = 0; u < V; ++u) {
        for (Eigen::Index v = u + 1; v < V; ++v) {
            double c = 0.0;
            if (order == CurveOrder::SubjectFirst) {
                a.resize(F);
                b.resize(F);
                for (Eigen::Index i = 0; i < n; ++i) {
                    for (std::size_t f = 0; f < F; ++f) {
                        a[f] = draws[f](i, u);
                        b[f] = draws[f](i, v);
                    }
                    c += pearson(a, b);
                }
                c /= static_cast<double>(n);
            } else {
                a.clear();
                b.clear();
                for (std::size_t f = 0; f < F; ++f) {
                    for (Eigen::Index i = 0; i < n; ++i) {
                        a.push_back(draws[f](i, u));
                        b.push_back(draws[f](i, v));
                    }
                }
                c = pearson(a, b);
            }
            C(u, v) = c;
            C(v, u) = c;
        }
    }
    return C;
}

SpatialCurve binCorrelations(const Matrix& corr, const Matrix& coords, const CurveOptions& opts) {
    if (opts.bins < 1) throw InvalidInput("spatial curve needs at least one bin");
    const auto V = coords.rows();
    const Matrix D = pairwiseDistances(coords);
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (Eigen::Index u = 0; u < V; ++u) {
        for (Eigen::Index v = u + 1; v < V; ++v) {
            dmin = std::min(dmin, D(u, v));
            dmax = std::max(dmax, D(u, v));
        }
    }
    const double width = (dmax - dmin) / opts.bins;

    SpatialCurve curve;
    curve.self.count = static_cast<int>(V);
    curve.self.correlation = corr.diagonal().mean();
    if (opts.referenceZeta) curve.self.reference = 1.0;

    std::vector<SpatialBin> bins(static_cast<std::size_t>(opts.bins));
    std::vector<double> refSum(bins.size(), 0.0);
    for (std::size_t k = 0; k < bins.size(); ++k) {
        bins[k].lower = dmin + width * static_cast<double>(k);
        bins[k].upper = k + 1 == bins.size() ? dmax : dmin + width * static_cast<double>(k + 1);
        bins[k].midpoint = 0.5 * (bins[k].lower + bins[k].upper);
    }
    for (Eigen::Index u = 0; u < V; ++u) {
        for (Eigen::Index v = u + 1; v < V; ++v) {
            std::size_t k = width > 0.0 ? static_cast<std::size_t>((D(u, v) - dmin) / width) : 0;
            k = std::min(k, bins.size() - 1);
            bins[k].count += 1;
            bins[k].correlation += corr(u, v);
            if (opts.referenceZeta) refSum[k] += std::exp(-*opts.referenceZeta * D(u, v));
        }
    }
    for (std::size_t k = 0; k < bins.size(); ++k) {
        auto& bin = bins[k];
        if (bin.count < opts.minPairs) {
            curve.warnings.push_back("dropped distance bin [" + std::to_string(bin.lower) + ", " +
                                     std::to_string(bin.upper) + "] with " +
                                     std::to_string(bin.count) + " pair(s)");
            continue;
        }
        bin.correlation /= bin.count;
        if (opts.referenceZeta) bin.reference = refSum[k] / bin.count;
        curve.bins.push_back(bin);
    }
    return curve;
}

SpatialCurve spatialCorrelationCurve(const Chain& chain, const Dataset& data, Rng& rng,
                                     const CurveOptions& opts) {
    const auto draws = predictiveAttributeDraws(chain, data, rng);
    return binCorrelations(predictiveCorrelations(draws, opts.order), data.coords, opts);
}

Vector impliedCrossCovariance(const Chain& chain, double x) {
    if (chain.states.empty()) throw InvalidInput("chain has no stored draws");
    const int R = chain.states.front().rank();
    Vector acc = Vector::Zero(R);
    for (const auto& s : chain.states) acc += x * s.Delta * s.L.block(1, 0, R, 1);
    return acc / static_cast<double>(chain.states.size());
}

Prediction posteriorPredict(const Chain& chain, const Vector& newX, const Matrix& newW,
                            const Dataset& data, Rng& rng, double level, bool keepDraws) {
    if (chain.states.empty()) throw InvalidInput("chain has no stored draws");
    const auto m = newX.size();
    if (newW.rows() != m || newW.cols() != data.q)
        throw InvalidInput("new auxiliaries must be m x q");
    const auto F = static_cast<Eigen::Index>(chain.states.size());
    const int V = data.V;
    const int h = edgeCount(V);

    std::vector<Vector> betas;
    betas.reserve(chain.states.size());
    for (const auto& s : chain.states) betas.push_back(betaUpper(s.lambda, s.xi));
    KernelCache kernels(chain, data);

    Prediction p;
    p.level = level;
    p.edgeMean.resize(m, h);
    p.edgeLower.resize(m, h);
    p.edgeUpper.resize(m, h);
    p.attrMean.resize(m, V);
    p.attrLower.resize(m, V);
    p.attrUpper.resize(m, V);

    Matrix edges(F, h);
    Matrix attrs(F, V);
    Vector eps(V);
    std::vector<double> col(static_cast<std::size_t>(F));
    auto summarizeInto = [&](const Matrix& draws, Eigen::Index j, Matrix& mean, Matrix& lo, Matrix& hi) {
        for (Eigen::Index c = 0; c < draws.cols(); ++c) {
            for (Eigen::Index f = 0; f < F; ++f) col[static_cast<std::size_t>(f)] = draws(f, c);
            mean(j, c) = draws.col(c).mean();
            std::tie(lo(j, c), hi(j, c)) = equalTailedInterval(col, level);
        }
    };

    for (Eigen::Index j = 0; j < m; ++j) {
        const double x = newX(j);
        for (Eigen::Index f = 0; f < F; ++f) {
            const auto& s = chain.states[static_cast<std::size_t>(f)];
            const double shiftY = s.muY + (data.q ? newW.row(j).dot(s.gammaY) : 0.0);
            const double sdY = std::sqrt(s.tauY2);
            const Vector& beta = betas[static_cast<std::size_t>(f)];
            for (int e = 0; e < h; ++e) edges(f, e) = shiftY + beta(e) * x + sdY * rng.normal();

            const Matrix& chol = kernels.cholesky(s);
            for (int v = 0; v < V; ++v) eps(v) = rng.normal();
            const Vector delta = std::sqrt(s.tauZ2) * (chol * eps);
            const double shiftZ = s.muZ + (data.q ? newW.row(j).dot(s.gammaZ) : 0.0);
            for (int v = 0; v < V; ++v) attrs(f, v) = shiftZ + s.xi(v, 0) * x + delta(v);
        }
        summarizeInto(edges, j, p.edgeMean, p.edgeLower, p.edgeUpper);
        summarizeInto(attrs, j, p.attrMean, p.attrLower, p.attrUpper);
        if (keepDraws) {
            p.edgeDraws.push_back(edges);
            p.attrDraws.push_back(attrs);
        }
    }
    return p;
}

}  // namespace sjm
