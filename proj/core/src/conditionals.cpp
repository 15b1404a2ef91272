#include "sjm/conditionals.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sjm/algebra.hpp"
#include "sjm/distributions.hpp"
#include "sjm/error.hpp"

namespace sjm {

PreparedData prepare(const Dataset& data) {
    PreparedData d;
    d.n = data.n;
    d.V = data.V;
    d.q = data.q;
    d.h = edgeCount(data.V);
    d.Y = stackNetworks(data);
    d.Z = data.attributes;
    d.x = data.predictor;
    d.W = data.auxiliaries;
    d.gram = d.W.transpose() * d.W;
    d.sumX2 = d.x.squaredNorm();
    d.incident.reserve(d.V);
    for (int v = 0; v < d.V; ++v) d.incident.push_back(incidentEdges(v, d.V));
    return d;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double auxShift(const PreparedData& d, int i, const Vector& gamma) {
    return d.q == 0 ? 0.0 : d.W.row(i).dot(gamma);
}

// y_i - beta x_i - w_i^T gamma_y, i.e. the network residual with mu_y left in.
Matrix networkResidualsFrom(const PreparedData& d, const ModelState& s, bool withMu, bool withGamma) {
    const Vector beta = betaUpper(s.lambda, s.xi);
    Matrix E = d.Y;
    for (int i = 0; i < d.n; ++i) {
        double shift = 0.0;
        if (withMu) shift += s.muY;
        if (withGamma) shift += auxShift(d, i, s.gammaY);
        E.row(i).array() -= shift;
        E.row(i) -= d.x(i) * beta.transpose();
    }
    return E;
}

Matrix attributeResidualsFrom(const PreparedData& d, const ModelState& s, bool withMu, bool withGamma) {
    const Vector alpha = s.xi.col(0);
    Matrix E = d.Z;
    for (int i = 0; i < d.n; ++i) {
        double shift = 0.0;
        if (withMu) shift += s.muZ;
        if (withGamma) shift += auxShift(d, i, s.gammaZ);
        E.row(i).array() -= shift;
        E.row(i) -= d.x(i) * alpha.transpose();
    }
    return E;
}

GaussianParams gaussianFromPrecision(const Matrix& precision, const Vector& rhs, const char* what) {
    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success) {
        throw InvalidInput(std::string(what) +
                           ": auxiliary Gram matrix is singular; use more subjects or fewer "
                           "auxiliary predictors");
    }
    GaussianParams g;
    const auto k = precision.rows();
    g.cov = llt.solve(Matrix::Identity(k, k));
    g.cov = 0.5 * (g.cov + g.cov.transpose()).eval();
    g.mean = llt.solve(rhs);
    return g;
}

}  // namespace

NormalParams condMuY(const PreparedData& d, const ModelState& s, const Hyperparameters& h) {
    const Matrix E = networkResidualsFrom(d, s, false, true);
    const double precision = d.n * d.h / s.tauY2 + h.interceptPrecision;
    return {E.sum() / s.tauY2 / precision, 1.0 / precision};
}

GaussianParams condGammaY(const PreparedData& d, const ModelState& s, const Hyperparameters& h) {
    if (d.q == 0) return {Vector(0), Matrix(0, 0)};
    const Matrix E = networkResidualsFrom(d, s, true, false);
    const Vector rowSums = E.rowwise().sum();
    Matrix precision = (d.h / s.tauY2) * d.gram;
    precision.diagonal().array() += h.auxPrecision;
    const Vector rhs = d.W.transpose() * rowSums / s.tauY2;
    return gaussianFromPrecision(precision, rhs, "gamma_y update");
}

InvGammaParams condTauY2(const PreparedData& d, const ModelState& s, const Hyperparameters& h) {
    const Matrix E = networkResidualsFrom(d, s, true, true);
    return {h.a + 0.5 * d.h * d.n, h.b + 0.5 * E.squaredNorm()};
}

std::array<double, 3> lambdaLogLikelihoods(int r, const PreparedData& d, const ModelState& s) {
    if (r < 0 || r >= s.rank()) throw InvalidInput("lambda index out of range");
    ModelState base = s;
    base.lambda(r) = 0;
    const Matrix E = networkResidualsFrom(d, base, true, true);
    const Vector layer = latentLayer(s.xi, r);
    const double rss0 = E.squaredNorm();
    const double cross = (d.x.transpose() * E * layer)(0, 0);
    const double quad = d.sumX2 * layer.squaredNorm();
    std::array<double, 3> out{};
    for (std::size_t k = 0; k < 3; ++k) {
        const double c = kLambdaValues[k];
        out[k] = -0.5 * (rss0 - 2.0 * c * cross + c * c * quad) / s.tauY2;
    }
    return out;
}

Vector condLambdaR(int r, const PreparedData& d, const ModelState& s) {
    const auto ll = lambdaLogLikelihoods(r, d, s);
    std::array<double, 3> w{};
    for (std::size_t k = 0; k < 3; ++k) {
        const double p = s.pi(r, static_cast<Eigen::Index>(k));
        w[k] = p > 0.0 ? std::log(p) + ll[k] : kNegInf;
    }
    return normalizeLogWeights(w);
}

Vector condPiR(int r, const ModelState& s, const Hyperparameters& h) {
    Vector conc(3);
    const int l = s.lambda(r);
    conc << std::pow(static_cast<double>(r + 1), h.xiExp) + (l == 0 ? 1.0 : 0.0),
        1.0 + (l == 1 ? 1.0 : 0.0), 1.0 + (l == -1 ? 1.0 : 0.0);
    return conc;
}

NormalParams condMuZ(const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                     const KernelMatrix& kernel) {
    const Matrix E = attributeResidualsFrom(d, s, false, true);
    const Vector total = E.colwise().sum().transpose();
    const double precision = d.n * kernel.onesPrecisionOnes / s.tauZ2 + h.interceptPrecision;
    return {kernel.precisionOnes.dot(total) / s.tauZ2 / precision, 1.0 / precision};
}

GaussianParams condGammaZ(const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                          const KernelMatrix& kernel) {
    if (d.q == 0) return {Vector(0), Matrix(0, 0)};
    const Matrix E = attributeResidualsFrom(d, s, true, false);
    const Vector weighted = E * kernel.precisionOnes;  // 1^T Sigma^{-1} r_i per subject
    Matrix precision = (kernel.onesPrecisionOnes / s.tauZ2) * d.gram;
    precision.diagonal().array() += h.auxPrecision;
    const Vector rhs = d.W.transpose() * weighted / s.tauZ2;
    return gaussianFromPrecision(precision, rhs, "gamma_z update");
}

InvGammaParams condTauZ2(const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                         const KernelMatrix& kernel) {
    const Matrix E = attributeResidualsFrom(d, s, true, true);
    const double quad = ((E * kernel.precision).array() * E.array()).sum();
    return {h.a + 0.5 * d.n * d.V, h.b + 0.5 * quad};
}

Vector condZeta(const PreparedData& d, const ModelState& s, const std::vector<KernelMatrix>& kernels) {
    if (kernels.empty()) throw InvalidInput("zeta update needs at least one grid kernel");
    const Matrix E = attributeResidualsFrom(d, s, true, true);
    const Matrix scatter = E.transpose() * E;
    std::vector<double> logw(kernels.size());
    for (std::size_t l = 0; l < kernels.size(); ++l) {
        const double quad = (kernels[l].precision.array() * scatter.array()).sum();
        logw[l] = -0.5 * d.n * kernels[l].logdet - 0.5 * quad / s.tauZ2;
    }
    return normalizeLogWeights(logw);
}

BetaParams condDelta(const ModelState& s, const Hyperparameters& h) {
    const double active = s.eta.sum();
    return {h.aDelta + active, h.bDelta + s.nodes() - active};
}

InvWishartParams condL(const ModelState& s, const Hyperparameters& h) {
    InvWishartParams p{h.nu, h.SigmaL};
    for (int v = 0; v < s.nodes(); ++v) {
        if (s.eta(v) != 1) continue;
        p.df += 1.0;
        p.scale += s.xi.row(v).transpose() * s.xi.row(v);
    }
    return p;
}

SlabSystem slabSystem(int v, const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                      const KernelMatrix& kernel, const ModelVariant& variant) {
    const int R = s.rank();
    const int K = R + 1;
    if (v < 0 || v >= d.V) throw InvalidInput("node index out of range");

    Eigen::LLT<Matrix> lLlt(s.L);
    if (lLlt.info() != Eigen::Success) throw NumericalError("L is not positive definite");
    const double logdetL = 2.0 * Matrix(lLlt.matrixL()).diagonal().array().log().sum();

    SlabSystem sys;
    sys.precision = lLlt.solve(Matrix::Identity(K, K));
    sys.rhs = Vector::Zero(K);

    if (variant.usesAttribute()) {
        // Pseudo-observations f_i with design x_i and noise variance attrVar.
        Vector f(d.n);
        double attrVar = s.tauZ2;
        if (h.attributeUpdate == AttributeUpdate::Whitened) {
            const double pvv = kernel.precision(v, v);
            attrVar = s.tauZ2 / pvv;
            for (int i = 0; i < d.n; ++i) {
                const double shift = s.muZ + auxShift(d, i, s.gammaZ);
                double acc = 0.0;
                for (int u = 0; u < d.V; ++u) {
                    const double e = d.Z(i, u) - shift - (u == v ? 0.0 : s.xi(u, 0) * d.x(i));
                    acc += kernel.precision(v, u) * e;
                }
                f(i) = acc / pvv;
            }
        } else {
            for (int i = 0; i < d.n; ++i) f(i) = d.Z(i, v) - s.muZ - auxShift(d, i, s.gammaZ);
        }
        sys.precision(0, 0) += d.sumX2 / attrVar;
        sys.rhs(0) += d.x.dot(f) / attrVar;
    }

    if (variant.usesNetwork()) {
        // Rows u != v of theta Lambda, in incident-edge order.
        const auto& edges = d.incident[v];
        Matrix T(d.V - 1, R);
        int k = 0;
        for (int u = 0; u < d.V; ++u) {
            if (u == v) continue;
            for (int r = 0; r < R; ++r) T(k, r) = s.xi(u, r + 1) * s.lambda(r);
            ++k;
        }
        // sum_i x_i (y_i^(v) - mu_y - gamma_y^T w_i)
        Vector sxy = Vector::Zero(d.V - 1);
        for (int i = 0; i < d.n; ++i) {
            const double shift = s.muY + auxShift(d, i, s.gammaY);
            for (int e = 0; e < d.V - 1; ++e) sxy(e) += d.x(i) * (d.Y(i, edges[e]) - shift);
        }
        sys.precision.bottomRightCorner(R, R) += (d.sumX2 / s.tauY2) * (T.transpose() * T);
        sys.rhs.tail(R) += T.transpose() * sxy / s.tauY2;
    }

    sys.precision = 0.5 * (sys.precision + sys.precision.transpose()).eval();
    Eigen::LLT<Matrix> mLlt(sys.precision);
    if (mLlt.info() != Eigen::Success)
        throw NumericalError("slab precision for node " + std::to_string(v) + " is not positive definite");
    sys.cov = mLlt.solve(Matrix::Identity(K, K));
    sys.cov = 0.5 * (sys.cov + sys.cov.transpose()).eval();
    sys.mean = mLlt.solve(sys.rhs);
    const double logdetM = 2.0 * Matrix(mLlt.matrixL()).diagonal().array().log().sum();
    sys.logBayesFactor = -0.5 * logdetL - 0.5 * logdetM + 0.5 * sys.rhs.dot(sys.mean);
    return sys;
}

GaussianParams condXiV(int v, const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                       const KernelMatrix& kernel, const ModelVariant& variant) {
    SlabSystem sys = slabSystem(v, d, s, h, kernel, variant);
    return {std::move(sys.mean), std::move(sys.cov)};
}

double inclusionProbability(double Delta, double logBayesFactor) {
    const std::array<double, 2> w{Delta < 1.0 ? std::log1p(-Delta) : kNegInf,
                                  Delta > 0.0 ? std::log(Delta) + logBayesFactor : kNegInf};
    return normalizeLogWeights(w)(1);
}

double condEtaV(int v, const PreparedData& d, const ModelState& s, const Hyperparameters& h,
                const KernelMatrix& kernel, const ModelVariant& variant) {
    return inclusionProbability(s.Delta, slabSystem(v, d, s, h, kernel, variant).logBayesFactor);
}

}  // namespace sjm
