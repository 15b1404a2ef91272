#include "sjm/simulate.hpp"

#include <cmath>
#include <string>

#include "sjm/algebra.hpp"
#include "sjm/distributions.hpp"
#include "sjm/error.hpp"

namespace sjm {

void validateScenario(const ScenarioConfig& c) {
    if (!(c.sparsity >= 0.0 && c.sparsity < 1.0))
        throw InvalidInput("node sparsity must lie in [0, 1)");
    if (!(c.zetaStar > 0.0)) throw InvalidInput("zeta* must be positive");
    if (c.n < 1 || c.V < 2 || c.q < 0 || c.Rstar < 1)
        throw InvalidInput("scenario dimensions must be positive (V >= 2)");
    if (!(c.tauY2Star >= 0.0) || !(c.tauZ2Star >= 0.0))
        throw InvalidInput("true variances must be non-negative");
    if (c.gammaYStar.size() != c.q || c.gammaZStar.size() != c.q)
        throw InvalidInput("true auxiliary coefficients must have length q");
}

std::vector<ScenarioConfig> builtinScenarios() {
    struct Setting {
        double sparsity;
        double zeta;
    };
    constexpr Setting table[] = {{0.8, 0.05}, {0.7, 0.1}, {0.7, 0.2}, {0.5, 0.1},
                                 {0.5, 0.2},  {0.4, 0.05}, {0.3, 0.05}};
    std::vector<ScenarioConfig> out;
    int id = 1;
    for (const auto& s : table) {
        ScenarioConfig c;
        c.id = id++;
        c.sparsity = s.sparsity;
        c.zetaStar = s.zeta;
        out.push_back(c);
    }
    return out;
}

ScenarioConfig scenario(int id) {
    const auto all = builtinScenarios();
    if (id < 1 || id > static_cast<int>(all.size()))
        throw InvalidInput("scenario id must be between 1 and " + std::to_string(all.size()));
    return all[static_cast<std::size_t>(id - 1)];
}

GroundTruth generateTruth(const ScenarioConfig& cfg, Rng& rng) {
    validateScenario(cfg);
    const int V = cfg.V;
    const int K = cfg.Rstar + 1;
    GroundTruth t;
    t.zetaStar = cfg.zetaStar;

    t.etaStar = IntVector::Zero(V);
    for (int attempt = 0;; ++attempt) {
        for (int v = 0; v < V; ++v) t.etaStar(v) = bernoulliDraw(cfg.DeltaStar(), rng) ? 1 : 0;
        if (t.etaStar.sum() > 0) break;
        if (attempt + 1 >= kMaxEtaResamples)
            throw InvalidInput("every node drew inactive in " + std::to_string(kMaxEtaResamples) +
                               " attempts; node sparsity is too high");
    }

    t.Lstar = invWishartDraw(cfg.Rstar + 2.0, Matrix::Identity(K, K), rng);
    Eigen::LLT<Matrix> llt(t.Lstar);
    const Matrix chol = llt.matrixL();
    t.xiStar = Matrix::Zero(V, K);
    for (int v = 0; v < V; ++v) {
        if (t.etaStar(v) == 1) t.xiStar.row(v) = mvnDraw(Vector::Zero(K), chol, rng).transpose();
    }
    t.betaStar = betaFromLatent(IntVector::Ones(cfg.Rstar), t.xiStar);

    t.coords = Matrix(V, 3);
    for (int v = 0; v < V; ++v)
        for (int c = 0; c < 3; ++c) t.coords(v, c) = rng.normal();

    const KernelMatrix kernel = kernelMatrix(t.coords, cfg.zetaStar);
    const double sd = std::sqrt(cfg.tauZ2Star);
    t.deltaStar = Matrix(cfg.n, V);
    for (int i = 0; i < cfg.n; ++i) {
        Vector eps(V);
        for (int v = 0; v < V; ++v) eps(v) = rng.normal();
        t.deltaStar.row(i) = (sd * (kernel.cholesky * eps)).transpose();
    }
    return t;
}

Dataset generateDataset(const ScenarioConfig& cfg, const GroundTruth& truth, Rng& rng) {
    validateScenario(cfg);
    if (truth.deltaStar.rows() != cfg.n || truth.coords.rows() != cfg.V)
        throw InvalidInput("ground truth does not match the scenario dimensions");
    Dataset d;
    d.n = cfg.n;
    d.V = cfg.V;
    d.q = cfg.q;
    d.coords = truth.coords;
    d.predictor = Vector(d.n);
    d.auxiliaries = Matrix(d.n, d.q);
    for (int i = 0; i < d.n; ++i) {
        d.predictor(i) = rng.normal();
        for (int j = 0; j < d.q; ++j) d.auxiliaries(i, j) = rng.normal();
    }

    const double sdY = std::sqrt(cfg.tauY2Star);
    d.networks.resize(static_cast<std::size_t>(d.n));
    d.attributes = Matrix(d.n, d.V);
    for (int i = 0; i < d.n; ++i) {
        const double x = d.predictor(i);
        const double shiftY = cfg.muYStar + d.auxiliaries.row(i).dot(cfg.gammaYStar);
        Matrix Y = Matrix::Zero(d.V, d.V);
        for (int u = 0; u < d.V; ++u) {
            for (int v = u + 1; v < d.V; ++v) {
                const double y = shiftY + truth.betaStar(u, v) * x + sdY * rng.normal();
                Y(u, v) = y;
                Y(v, u) = y;
            }
        }
        d.networks[static_cast<std::size_t>(i)] = std::move(Y);

        const double shiftZ = cfg.muZStar + d.auxiliaries.row(i).dot(cfg.gammaZStar);
        for (int v = 0; v < d.V; ++v)
            d.attributes(i, v) = shiftZ + truth.xiStar(v, 0) * x + truth.deltaStar(i, v);
    }
    return d;
}

Dataset generateSubjects(const ScenarioConfig& cfg, const GroundTruth& truth, int m, Rng& rng) {
    if (m < 1) throw InvalidInput("subject count must be positive");
    ScenarioConfig local = cfg;
    local.n = m;
    GroundTruth fresh = truth;
    const KernelMatrix kernel = kernelMatrix(truth.coords, truth.zetaStar);
    const double sd = std::sqrt(cfg.tauZ2Star);
    fresh.deltaStar = Matrix(m, cfg.V);
    for (int i = 0; i < m; ++i) {
        Vector eps(cfg.V);
        for (int v = 0; v < cfg.V; ++v) eps(v) = rng.normal();
        fresh.deltaStar.row(i) = (sd * (kernel.cholesky * eps)).transpose();
    }
    return generateDataset(local, fresh, rng);
}

void regenerateResponses(Dataset& data, const ModelState& s, const KernelMatrix& kernel, Rng& rng) {
    const Matrix B = betaFromLatent(s.lambda, s.xi);
    const double sdY = std::sqrt(s.tauY2);
    const double sdZ = std::sqrt(s.tauZ2);
    for (int i = 0; i < data.n; ++i) {
        const double x = data.predictor(i);
        const double shiftY = s.muY + (data.q ? data.auxiliaries.row(i).dot(s.gammaY) : 0.0);
        Matrix& Y = data.networks[static_cast<std::size_t>(i)];
        for (int u = 0; u < data.V; ++u) {
            for (int v = u + 1; v < data.V; ++v) {
                const double y = shiftY + B(u, v) * x + sdY * rng.normal();
                Y(u, v) = y;
                Y(v, u) = y;
            }
        }
        Vector eps(data.V);
        for (int v = 0; v < data.V; ++v) eps(v) = rng.normal();
        const Vector delta = sdZ * (kernel.cholesky * eps);
        const double shiftZ = s.muZ + (data.q ? data.auxiliaries.row(i).dot(s.gammaZ) : 0.0);
        for (int v = 0; v < data.V; ++v) data.attributes(i, v) = shiftZ + s.xi(v, 0) * x + delta(v);
    }
}

}  // namespace sjm
