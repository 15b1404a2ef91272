#pragma once

// Closed-form conditionals against brute-force evaluations of the joint
// density. Each check reports the largest relative error it saw.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "sjm/conditionals.hpp"
#include "sjm/kernel.hpp"

namespace oracle {

struct OracleCheck {
    std::string name;
    double relError = 0.0;
};

using StateEdit = std::function<void(ModelState&, double)>;

/// Normalizes exp(logJoint) along one coordinate with Simpson's rule and
/// compares it with the closed-form density at the probe points.
inline double densityError1D(const std::function<double(double)>& logTarget,
                             const std::function<double(double)>& closedLogPdf, double lo, double hi,
                             const std::vector<double>& probes, int panels = 4000) {
    double ref = -INFINITY;
    for (double x : probes) ref = std::max(ref, logTarget(x));
    const double Z = simpson([&](double x) { return std::exp(logTarget(x) - ref); }, lo, hi, panels);
    double worst = 0.0;
    for (double x : probes) {
        const double brute = std::exp(logTarget(x) - ref) / Z;
        const double closed = std::exp(closedLogPdf(x));
        worst = std::max(worst, std::abs(brute - closed) / closed);
    }
    return worst;
}

inline double normalCheck(const TinyProblem& p, const Blocks& b, const StateEdit& set, double mean, double var) {
    const double sd = std::sqrt(var);
    auto target = [&](double x) {
        ModelState s = p.state;
        set(s, x);
        return logJoint(p.data, s, p.hyper, b);
    };
    return densityError1D(
        target, [&](double x) { return logNormal(x, mean, var); }, mean - 12.0 * sd, mean + 12.0 * sd,
        {mean, mean - 0.7 * sd, mean + 1.3 * sd, mean - 2.1 * sd, mean + 2.9 * sd});
}

/// Inverse-gamma conditional, integrated over log(x) so both tails are short.
inline double invGammaCheck(const TinyProblem& p, const Blocks& b, const StateEdit& set, double shape, double rate) {
    const double centre = std::log(rate / shape);
    const double sd = 1.0 / std::sqrt(shape);
    auto target = [&](double u) {
        ModelState s = p.state;
        set(s, std::exp(u));
        return logJoint(p.data, s, p.hyper, b) + u;
    };
    return densityError1D(
        target, [&](double u) { return logInvGamma(std::exp(u), shape, rate) + u; }, centre - 14.0 * sd,
        centre + 14.0 * sd, {centre, centre - 0.9 * sd, centre + 1.1 * sd, centre + 2.0 * sd});
}

inline double probabilityError(const Vector& closed, const std::vector<double>& bruteLog) {
    const double m = *std::max_element(bruteLog.begin(), bruteLog.end());
    double Z = 0.0;
    for (double l : bruteLog) Z += std::exp(l - m);
    double worst = 0.0;
    for (std::size_t k = 0; k < bruteLog.size(); ++k) {
        const double brute = std::exp(bruteLog[k] - m) / Z;
        const double c = closed(static_cast<Eigen::Index>(k));
        if (c > 1e-300) worst = std::max(worst, std::abs(brute - c) / c);
        else worst = std::max(worst, brute);
    }
    return worst;
}

/// Ratio check for a Gaussian conditional: log-density differences between
/// the mean and points along the covariance axes must agree.
inline double gaussianRatioError(const std::function<double(const Vector&)>& logTarget, const Vector& mean,
                                 const Matrix& cov) {
    const Matrix chol = Eigen::LLT<Matrix>(cov).matrixL();
    const double base = logTarget(mean);
    const Vector zero = Vector::Zero(mean.size());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < mean.size(); ++k) {
        for (double step : {-1.5, 0.8}) {
            Vector e = zero;
            e(k) = step;
            if (k + 1 < mean.size()) e(k + 1) = 0.5 * step;
            const Vector x = mean + chol * e;
            const double brute = logTarget(x) - base;
            const double closed = logMvn(x, mean, cov) - logMvn(mean, mean, cov);
            worst = std::max(worst, std::abs(std::expm1(brute - closed)));
        }
    }
    return worst;
}

inline sjm::KernelMatrix kernelForBlocks(const TinyProblem& p, const Blocks& b) {
    return b.spatial ? sjm::kernelMatrix(p.data.coords, p.state.zeta, 0.0) : sjm::identityKernel(p.data.V);
}

/// Every scalar and low-dimensional conditional on one tiny problem.
inline std::vector<OracleCheck> conjugacyChecks(const TinyProblem& p, const Blocks& b = {}) {
    using namespace sjm;
    const PreparedData d = prepare(p.data);
    const KernelMatrix K = kernelForBlocks(p, b);
    const ModelState& s = p.state;
    const Hyperparameters& h = p.hyper;
    std::vector<OracleCheck> out;

    if (b.network) {
        const auto mu = condMuY(d, s, h);
        out.push_back({"mu_y", normalCheck(p, b, [](ModelState& t, double x) { t.muY = x; }, mu.mean, mu.variance)});
        const auto tau = condTauY2(d, s, h);
        out.push_back(
            {"tau2_y", invGammaCheck(p, b, [](ModelState& t, double x) { t.tauY2 = x; }, tau.shape, tau.rate)});
        const auto g = condGammaY(d, s, h);
        if (d.q == 1) {
            out.push_back({"gamma_y", normalCheck(p, b, [](ModelState& t, double x) { t.gammaY(0) = x; }, g.mean(0),
                                                  g.cov(0, 0))});
        } else if (d.q > 1) {
            out.push_back({"gamma_y", gaussianRatioError(
                                          [&](const Vector& x) {
                                              ModelState t = s;
                                              t.gammaY = x;
                                              return logJoint(p.data, t, h, b);
                                          },
                                          g.mean, g.cov)});
        }
        for (int r = 0; r < s.rank(); ++r) {
            std::vector<double> brute;
            for (int c : kLambdaValues) {
                ModelState t = s;
                t.lambda(r) = c;
                brute.push_back(logJoint(p.data, t, h, b));
            }
            out.push_back({"lambda_" + std::to_string(r), probabilityError(condLambdaR(r, d, s), brute)});
        }
    }

    if (b.attribute) {
        const auto mu = condMuZ(d, s, h, K);
        out.push_back({"mu_z", normalCheck(p, b, [](ModelState& t, double x) { t.muZ = x; }, mu.mean, mu.variance)});
        const auto tau = condTauZ2(d, s, h, K);
        out.push_back(
            {"tau2_z", invGammaCheck(p, b, [](ModelState& t, double x) { t.tauZ2 = x; }, tau.shape, tau.rate)});
        const auto g = condGammaZ(d, s, h, K);
        if (d.q == 1) {
            out.push_back({"gamma_z", normalCheck(p, b, [](ModelState& t, double x) { t.gammaZ(0) = x; }, g.mean(0),
                                                  g.cov(0, 0))});
        } else if (d.q > 1) {
            out.push_back({"gamma_z", gaussianRatioError(
                                          [&](const Vector& x) {
                                              ModelState t = s;
                                              t.gammaZ = x;
                                              return logJoint(p.data, t, h, b);
                                          },
                                          g.mean, g.cov)});
        }
        if (b.spatial) {
            const auto kernels = gridKernels(p.data.coords, h.zetaGrid, 0.0);
            std::vector<double> brute;
            for (std::size_t l = 0; l < h.zetaGrid.size(); ++l) {
                ModelState t = s;
                t.zeta = h.zetaGrid[l];
                t.zetaIndex = static_cast<int>(l);
                brute.push_back(logJoint(p.data, t, h, b));
            }
            out.push_back({"zeta", probabilityError(condZeta(d, s, kernels), brute)});
        }
    }

    {
        const auto beta = condDelta(s, h);
        auto target = [&](double x) {
            ModelState t = s;
            t.Delta = x;
            return logJoint(p.data, t, h, b);
        };
        out.push_back({"Delta", densityError1D(
                                    target, [&](double x) { return logBetaPdf(x, beta.alpha, beta.beta); }, 0.0, 1.0,
                                    {0.13, 0.37, 0.5, 0.71, 0.88})});
    }

    if (b.network) {
        // pi_r on the simplex through (p1, t) with p2 = (1 - p1) t, p3 = (1 - p1)(1 - t).
        for (int r = 0; r < s.rank(); ++r) {
            const Vector conc = condPiR(r, s, h);
            auto logTarget = [&](double p1, double t) {
                ModelState u = s;
                u.pi(r, 0) = p1;
                u.pi(r, 1) = (1.0 - p1) * t;
                u.pi(r, 2) = (1.0 - p1) * (1.0 - t);
                return logJoint(p.data, u, h, b) + std::log1p(-p1);
            };
            // The integrand is a polynomial in (p1, t), so Gauss-Legendre is exact.
            const double ref = logTarget(0.5, 0.5);
            const auto [nodes, weights] = gaussLegendre(24);
            double Z = 0.0;
            for (std::size_t a = 0; a < nodes.size(); ++a)
                for (std::size_t c = 0; c < nodes.size(); ++c)
                    Z += weights[a] * weights[c] * std::exp(logTarget(nodes[a], nodes[c]) - ref);
            double worst = 0.0;
            for (auto [p1, t] : {std::pair{0.3, 0.4}, std::pair{0.6, 0.7}, std::pair{0.15, 0.2}}) {
                const double brute = std::exp(logTarget(p1, t) - ref) / Z / (1.0 - p1);
                Vector pt(3);
                pt << p1, (1.0 - p1) * t, (1.0 - p1) * (1.0 - t);
                const double closed = std::exp(logDirichlet(pt, conc));
                worst = std::max(worst, std::abs(brute - closed) / closed);
            }
            out.push_back({"pi_" + std::to_string(r), worst});
        }
    }

    {
        const auto iw = condL(s, h);
        const Matrix base = iw.scale / (iw.df + s.L.rows() + 1.0);
        double worst = 0.0;
        for (double scale : {0.6, 1.7}) {
            Matrix alt = base * scale;
            alt.diagonal().array() += 0.1 * base.trace() / static_cast<double>(base.rows());
            ModelState a = s, c = s;
            a.L = base;
            c.L = alt;
            const double brute = logJoint(p.data, c, h, b) - logJoint(p.data, a, h, b);
            const double closed = logInvWishart(alt, iw.df, iw.scale) - logInvWishart(base, iw.df, iw.scale);
            worst = std::max(worst, std::abs(std::expm1(brute - closed)));
        }
        out.push_back({"L", worst});
    }

    const sjm::ModelVariant variant{b.network && b.attribute
                                        ? (b.spatial ? VariantKind::SpatialJoint : VariantKind::NonSpatialJoint)
                                        : (b.network ? VariantKind::IndependentNetwork
                                                     : VariantKind::IndependentAttribute)};
    for (int v = 0; v < s.nodes(); ++v) {
        const SlabSystem sys = slabSystem(v, d, s, h, K, variant);
        auto withXi = [&](const Vector& x) {
            ModelState t = s;
            t.eta(v) = 1;
            t.xi.row(v) = x.transpose();
            return logJoint(p.data, t, h, b);
        };
        out.push_back({"xi_" + std::to_string(v), gaussianRatioError(withXi, sys.mean, sys.cov)});

        // Candidate's formula: p(eta=1, xi | rest) / p(xi | eta=1, rest)
        // is free of xi and equals the eta = 1 marginal.
        ModelState off = s;
        off.eta(v) = 0;
        off.xi.row(v).setZero();
        const double logOn = withXi(sys.mean) - logMvn(sys.mean, sys.mean, sys.cov);
        const double bruteLbf = logOn - logJoint(p.data, off, h, b) - std::log(s.Delta) + std::log1p(-s.Delta);
        out.push_back({"eta_" + std::to_string(v),
                       std::abs(bruteLbf - sys.logBayesFactor) / std::max(1.0, std::abs(sys.logBayesFactor))});
    }
    return out;
}

inline double worstError(const std::vector<OracleCheck>& checks) {
    double worst = 0.0;
    for (const auto& c : checks) worst = std::max(worst, c.relError);
    return worst;
}

}  // namespace oracle
