#include "sjm/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "sjm/algebra.hpp"
#include "sjm/distributions.hpp"
#include "sjm/error.hpp"
#include "sjm/validate.hpp"

namespace sjm {

SweepPlan SweepPlan::standard() {
    return {{Block::Zeta, Block::TauZ2, Block::TauY2, Block::MuY, Block::MuZ, Block::GammaY,
             Block::GammaZ, Block::L, Block::Delta, Block::PiLambda, Block::XiEta}};
}

bool SweepPlan::complete() const {
    const std::set<Block> seen(order.begin(), order.end());
    return seen.size() == order.size() && seen.size() == 11;
}

const KernelMatrix& SamplerContext::kernelFor(const ModelState& s) const {
    if (!variant.spatial()) return kernels.front();
    return kernels.at(static_cast<std::size_t>(s.zetaIndex));
}

SamplerContext makeContext(const Dataset& data, const Hyperparameters& hyper,
                           const ModelVariant& variant) {
    validateDataset(data);
    validateHyperparameters(hyper);
    SamplerContext ctx;
    ctx.data = prepare(data);
    ctx.hyper = hyper;
    ctx.variant = variant;
    if (variant.spatial()) {
        ctx.kernels = gridKernels(data.coords, hyper.zetaGrid, hyper.jitter);
    } else {
        ctx.kernels.push_back(identityKernel(data.V));
    }
    return ctx;
}

namespace {

double sampleVariance(const Matrix& M) {
    const double count = static_cast<double>(M.size());
    if (count < 2) return 1.0;
    const double mean = M.mean();
    const double var = (M.array() - mean).square().sum() / (count - 1.0);
    return var > 0.0 ? var : 1.0;
}

double clampOpenUnit(double p) {
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

Matrix piPriorMean(const Hyperparameters& h) {
    Matrix pi(h.R, 3);
    for (int r = 0; r < h.R; ++r) {
        const double first = std::pow(static_cast<double>(r + 1), h.xiExp);
        const double total = first + 2.0;
        pi(r, 0) = first / total;
        pi(r, 1) = 1.0 / total;
        pi(r, 2) = 1.0 - pi(r, 0) - pi(r, 1);
    }
    return pi;
}

// Per-column least-squares slopes on x, adjusting for an intercept and the
// auxiliaries. Empty when the design is rank deficient.
Matrix slopes(const PreparedData& d, const Matrix& responses) {
    Matrix X(d.n, 2 + d.q);
    X.col(0).setOnes();
    X.col(1) = d.x;
    if (d.q > 0) X.rightCols(d.q) = d.W;
    const Eigen::ColPivHouseholderQR<Matrix> qr(X);
    if (qr.rank() < X.cols()) return {};
    return qr.solve(responses).row(1);
}

struct LowRankFit {
    std::vector<double> values;
    std::vector<Vector> vectors;
    double residual = 0.0;  // off-diagonal squared error
};

enum class Signature { Magnitude, Positive, Negative };

// Rank-R eigen-fit of a zero-diagonal symmetric matrix, imputing the
// diagonal from the current fit. Starts from the row-wise largest magnitude.
LowRankFit imputeLowRank(const Matrix& B, int R, Signature sig) {
    const auto V = B.rows();
    Vector diag = B.cwiseAbs().rowwise().maxCoeff();
    LowRankFit fit;
    for (int iter = 0; iter < 200; ++iter) {
        Matrix M = B;
        M.diagonal() = diag;
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
        const Vector& values = eig.eigenvalues();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(V));
        for (Eigen::Index k = 0; k < V; ++k) order[static_cast<std::size_t>(k)] = k;
        auto score = [&](Eigen::Index k) {
            switch (sig) {
                case Signature::Positive: return values(k);
                case Signature::Negative: return -values(k);
                default: return std::abs(values(k));
            }
        };
        std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return score(i) > score(j); });
        fit.values.clear();
        fit.vectors.clear();
        Matrix lowRank = Matrix::Zero(V, V);
        for (int r = 0; r < std::min<Eigen::Index>(R, V); ++r) {
            const Eigen::Index k = order[static_cast<std::size_t>(r)];
            if (!(score(k) > 0.0)) break;
            fit.values.push_back(values(k));
            fit.vectors.push_back(eig.eigenvectors().col(k));
            lowRank += values(k) * eig.eigenvectors().col(k) * eig.eigenvectors().col(k).transpose();
        }
        Matrix off = B - lowRank;
        off.diagonal().setZero();
        fit.residual = off.squaredNorm();
        const Vector next = lowRank.diagonal();
        const bool converged = (next - diag).norm() <= 1e-10 * (1.0 + next.norm());
        diag = next;
        if (converged) break;
    }
    return fit;
}

// Starting lambda and theta from a signed low-rank fit of the per-edge
// slopes, and alpha from the per-node slopes.
void spectralLatent(const PreparedData& d, int R, ModelState& s) {
    const Matrix b = slopes(d, d.Y);
    if (b.size() != 0) {
        const Matrix B = devectorizeUpper(b.row(0).transpose(), d.V);
        LowRankFit best;
        bool first = true;
        for (Signature sig : {Signature::Magnitude, Signature::Positive, Signature::Negative}) {
            LowRankFit fit = imputeLowRank(B, R, sig);
            if (first || fit.residual < best.residual) best = std::move(fit);
            first = false;
        }
        for (int r = 0; r < R; ++r) {
            const auto k = static_cast<std::size_t>(r);
            if (k < best.values.size()) {
                s.lambda(r) = best.values[k] > 0.0 ? 1 : -1;
                s.xi.col(r + 1) = std::sqrt(std::abs(best.values[k])) * best.vectors[k];
            } else {
                s.lambda(r) = 0;
                s.xi.col(r + 1).setZero();
            }
        }
    }
    const Matrix a = slopes(d, d.Z);
    if (a.size() != 0) s.xi.col(0) = a.row(0).transpose();
}

void drawGaussianInto(Vector& target, const GaussianParams& g, Rng& rng) {
    if (g.mean.size() == 0) return;
    target = mvnDrawCov(g.mean, g.cov, rng);
}

void updatePiLambda(const SamplerContext& ctx, ModelState& s, Rng& rng) {
    for (int r = 0; r < s.rank(); ++r) {
        s.pi.row(r) = dirichletDraw(condPiR(r, s, ctx.hyper), rng).transpose();
        const Vector probs = condLambdaR(r, ctx.data, s);
        s.lambda(r) = kLambdaValues[categoricalFromProbabilities(probs, rng)];
    }
}

void updateXiEta(const SamplerContext& ctx, ModelState& s, Rng& rng) {
    const KernelMatrix& kernel = ctx.kernelFor(s);
    for (int v = 0; v < s.nodes(); ++v) {
        const SlabSystem sys = slabSystem(v, ctx.data, s, ctx.hyper, kernel, ctx.variant);
        const double p = inclusionProbability(s.Delta, sys.logBayesFactor);
        if (bernoulliDraw(p, rng)) {
            s.eta(v) = 1;
            s.xi.row(v) = mvnDrawCov(sys.mean, sys.cov, rng).transpose();
        } else {
            s.eta(v) = 0;
            s.xi.row(v).setZero();
        }
    }
}

}  // namespace

ModelState initialState(const SamplerContext& ctx, Rng& rng) {
    const auto& h = ctx.hyper;
    const auto& d = ctx.data;
    ModelState s;
    s.muY = 0.0;
    s.muZ = 0.0;
    s.gammaY = Vector::Zero(d.q);
    s.gammaZ = Vector::Zero(d.q);
    s.tauY2 = sampleVariance(d.Y);
    s.tauZ2 = sampleVariance(d.Z);
    s.Delta = 0.5;
    s.L = h.SigmaL;
    s.lambda = IntVector::Ones(h.R);
    s.pi = piPriorMean(h);
    s.eta = IntVector::Ones(d.V);
    s.xi = Matrix(d.V, h.R + 1);
    const double sd = std::sqrt(0.1);
    for (int v = 0; v < d.V; ++v)
        for (int k = 0; k <= h.R; ++k) s.xi(v, k) = sd * rng.normal();
    if (h.initialization == Initialization::Spectral) spectralLatent(d, h.R, s);
    if (ctx.variant.spatial()) {
        s.zetaIndex = static_cast<int>((h.zetaGrid.size() - 1) / 2);
        s.zeta = h.zetaGrid[static_cast<std::size_t>(s.zetaIndex)];
    } else {
        s.zetaIndex = 0;
        s.zeta = 0.0;
    }
    return s;
}

ModelState samplePrior(const Hyperparameters& h, int V, int q, Rng& rng) {
    validateHyperparameters(h);
    if (!(h.interceptPrecision > 0.0) || (q > 0 && !(h.auxPrecision > 0.0))) {
        throw InvalidInput("sampling from the prior needs proper intercept and auxiliary priors");
    }
    ModelState s;
    const double muSd = 1.0 / std::sqrt(h.interceptPrecision);
    s.muY = muSd * rng.normal();
    s.muZ = muSd * rng.normal();
    s.gammaY = Vector(q);
    s.gammaZ = Vector(q);
    const double gSd = q > 0 ? 1.0 / std::sqrt(h.auxPrecision) : 0.0;
    for (int j = 0; j < q; ++j) s.gammaY(j) = gSd * rng.normal();
    for (int j = 0; j < q; ++j) s.gammaZ(j) = gSd * rng.normal();
    s.tauY2 = invGammaDraw(h.a, h.b, rng);
    s.tauZ2 = invGammaDraw(h.a, h.b, rng);
    s.Delta = clampOpenUnit(betaDraw(h.aDelta, h.bDelta, rng));
    s.L = invWishartDraw(h.nu, h.SigmaL, rng);
    s.pi = Matrix(h.R, 3);
    s.lambda = IntVector(h.R);
    Vector conc(3);
    for (int r = 0; r < h.R; ++r) {
        conc << std::pow(static_cast<double>(r + 1), h.xiExp), 1.0, 1.0;
        s.pi.row(r) = dirichletDraw(conc, rng).transpose();
        s.lambda(r) = kLambdaValues[categoricalFromProbabilities(s.pi.row(r).transpose(), rng)];
    }
    s.eta = IntVector(V);
    s.xi = Matrix::Zero(V, h.R + 1);
    Eigen::LLT<Matrix> llt(s.L);
    const Matrix chol = llt.matrixL();
    for (int v = 0; v < V; ++v) {
        s.eta(v) = bernoulliDraw(s.Delta, rng) ? 1 : 0;
        if (s.eta(v) == 1) s.xi.row(v) = mvnDraw(Vector::Zero(h.R + 1), chol, rng).transpose();
    }
    const int g = static_cast<int>(h.zetaGrid.size());
    s.zetaIndex = g == 1 ? 0 : static_cast<int>(rng.uniform() * g);
    s.zetaIndex = std::min(s.zetaIndex, g - 1);
    s.zeta = h.zetaGrid[static_cast<std::size_t>(s.zetaIndex)];
    return s;
}

ModelState sweep(const SamplerContext& ctx, ModelState s, Rng& rng) {
    const auto& h = ctx.hyper;
    const auto& d = ctx.data;
    const bool net = ctx.variant.usesNetwork();
    const bool attr = ctx.variant.usesAttribute();

    for (Block block : ctx.plan.order) {
        switch (block) {
            case Block::Zeta:
                if (ctx.variant.spatial() && ctx.kernels.size() > 1) {
                    s.zetaIndex = categoricalFromProbabilities(condZeta(d, s, ctx.kernels), rng);
                    s.zeta = h.zetaGrid[static_cast<std::size_t>(s.zetaIndex)];
                }
                break;
            case Block::TauZ2:
                if (attr) {
                    const auto p = condTauZ2(d, s, h, ctx.kernelFor(s));
                    s.tauZ2 = invGammaDraw(p.shape, p.rate, rng);
                }
                break;
            case Block::TauY2:
                if (net) {
                    const auto p = condTauY2(d, s, h);
                    s.tauY2 = invGammaDraw(p.shape, p.rate, rng);
                }
                break;
            case Block::MuY:
                if (net) {
                    const auto p = condMuY(d, s, h);
                    s.muY = p.mean + std::sqrt(p.variance) * rng.normal();
                }
                break;
            case Block::MuZ:
                if (attr) {
                    const auto p = condMuZ(d, s, h, ctx.kernelFor(s));
                    s.muZ = p.mean + std::sqrt(p.variance) * rng.normal();
                }
                break;
            case Block::GammaY:
                if (net) drawGaussianInto(s.gammaY, condGammaY(d, s, h), rng);
                break;
            case Block::GammaZ:
                if (attr) drawGaussianInto(s.gammaZ, condGammaZ(d, s, h, ctx.kernelFor(s)), rng);
                break;
            case Block::L: {
                const auto p = condL(s, h);
                s.L = invWishartDraw(p.df, p.scale, rng);
                break;
            }
            case Block::Delta: {
                const auto p = condDelta(s, h);
                s.Delta = clampOpenUnit(betaDraw(p.alpha, p.beta, rng));
                break;
            }
            case Block::PiLambda:
                if (net) updatePiLambda(ctx, s, rng);
                break;
            case Block::XiEta:
                updateXiEta(ctx, s, rng);
                break;
        }
    }
    return s;
}

Chain runChain(const SamplerContext& ctx, Rng& rng, const ProgressCallback& progress) {
    const auto start = std::chrono::steady_clock::now();
    Chain chain;
    chain.hyper = ctx.hyper;
    chain.variant = ctx.variant;
    chain.streamId = rng.streamId();
    chain.hyper.seed = rng.seed();
    chain.states.reserve(static_cast<std::size_t>(ctx.hyper.iterations - ctx.hyper.burnin));

    ModelState s = initialState(ctx, rng);
    for (int it = 0; it < ctx.hyper.iterations; ++it) {
        s = sweep(ctx, std::move(s), rng);
        if (it >= ctx.hyper.burnin) chain.states.push_back(s);
        if (progress) progress(it, s);
    }
    chain.wallClock =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return chain;
}

Chain runChain(const Dataset& data, const Hyperparameters& hyper, Rng& rng,
               const ModelVariant& variant, const ProgressCallback& progress) {
    const SamplerContext ctx = makeContext(data, hyper, variant);
    Chain chain = runChain(ctx, rng, progress);
    chain.datasetFingerprint = datasetFingerprint(data);
    return chain;
}

}  // namespace sjm
