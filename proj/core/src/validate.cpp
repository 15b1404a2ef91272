#include "sjm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "sjm/error.hpp"

namespace sjm {

Hyperparameters Hyperparameters::defaults(int R) {
    Hyperparameters h;
    h.R = R;
    h.nu = R + 2.0;
    h.SigmaL = Matrix::Identity(R + 1, R + 1);
    h.zetaGrid.clear();
    constexpr int kGrid = 20;
    for (int k = 0; k < kGrid; ++k) h.zetaGrid.push_back(0.01 + k * (1.0 - 0.01) / (kGrid - 1));
    return h;
}

std::string variantName(VariantKind kind) {
    switch (kind) {
        case VariantKind::SpatialJoint: return "spatial-joint";
        case VariantKind::NonSpatialJoint: return "nonspatial-joint";
        case VariantKind::IndependentNetwork: return "independent-network";
        case VariantKind::IndependentAttribute: return "independent-attribute";
    }
    return "unknown";
}

VariantKind parseVariant(const std::string& name) {
    for (auto k : {VariantKind::SpatialJoint, VariantKind::NonSpatialJoint,
                   VariantKind::IndependentNetwork, VariantKind::IndependentAttribute}) {
        if (variantName(k) == name) return k;
    }
    throw InvalidInput("unknown model variant '" + name +
                       "' (expected spatial-joint, nonspatial-joint, independent-network or "
                       "independent-attribute)");
}

namespace {

template <class Derived>
void requireFinite(const Eigen::MatrixBase<Derived>& m, const std::string& what) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (!std::isfinite(m(r, c))) {
                throw InvalidInput(what + " has a non-finite entry at (" + std::to_string(r) + ", " +
                                   std::to_string(c) + ")");
            }
        }
    }
}

bool isSpd(const Matrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0) return false;
    if (!M.isApprox(M.transpose(), 1e-10)) return false;
    Eigen::LLT<Matrix> llt(M);
    return llt.info() == Eigen::Success;
}

}  // namespace

void validateDataset(const Dataset& data) {
    if (data.n < 1) throw InvalidInput("dataset needs at least one subject");
    if (data.V < 2) throw InvalidInput("dataset needs at least two nodes");
    if (data.q < 0) throw InvalidInput("auxiliary count q must be non-negative");
    if (static_cast<int>(data.networks.size()) != data.n) {
        throw InvalidInput("expected " + std::to_string(data.n) + " networks, got " +
                           std::to_string(data.networks.size()));
    }
    if (data.attributes.rows() != data.n || data.attributes.cols() != data.V)
        throw InvalidInput("attributes must be n x V");
    if (data.predictor.size() != data.n) throw InvalidInput("predictor must have length n");
    if (data.auxiliaries.rows() != data.n || data.auxiliaries.cols() != data.q)
        throw InvalidInput("auxiliaries must be n x q");
    if (data.coords.rows() != data.V || data.coords.cols() != 3)
        throw InvalidInput("coords must be V x 3");

    requireFinite(data.attributes, "attributes");
    requireFinite(data.predictor, "predictor");
    requireFinite(data.auxiliaries, "auxiliaries");
    requireFinite(data.coords, "coords");

    for (int i = 0; i < data.n; ++i) {
        const Matrix& M = data.networks[i];
        if (M.rows() != data.V || M.cols() != data.V) {
            throw InvalidInput("network of subject " + std::to_string(i) + " is not V x V");
        }
        for (int u = 0; u < data.V; ++u) {
            for (int v = 0; v < data.V; ++v) {
                if (!std::isfinite(M(u, v))) {
                    throw InvalidInput("network entry (subject " + std::to_string(i) + ", u " +
                                       std::to_string(u) + ", v " + std::to_string(v) +
                                       ") is not finite");
                }
            }
            if (std::abs(M(u, u)) > kSymmetryTolerance) {
                throw InvalidInput("network diagonal entry (subject " + std::to_string(i) + ", u " +
                                   std::to_string(u) + ", v " + std::to_string(u) + ") is nonzero");
            }
            for (int v = u + 1; v < data.V; ++v) {
                if (std::abs(M(u, v) - M(v, u)) > kSymmetryTolerance) {
                    throw InvalidInput("network is not symmetric at (subject " + std::to_string(i) +
                                       ", u " + std::to_string(u) + ", v " + std::to_string(v) + ")");
                }
            }
        }
    }

    for (int u = 0; u < data.V; ++u) {
        for (int v = u + 1; v < data.V; ++v) {
            if ((data.coords.row(u) - data.coords.row(v)).norm() <= 0.0) {
                throw InvalidInput("coordinates of nodes " + std::to_string(u) + " and " +
                                   std::to_string(v) + " coincide");
            }
        }
    }
}

void validateHyperparameters(const Hyperparameters& h) {
    if (h.R < 1) throw InvalidInput("latent rank R must be positive");
    if (!(h.xiExp > 1.0)) throw InvalidInput("Dirichlet exponent xi must exceed 1");
    if (!(h.a > 0.0) || !(h.b > 0.0)) throw InvalidInput("inverse-gamma a and b must be positive");
    if (!(h.nu > h.R)) throw InvalidInput("inverse-Wishart degrees of freedom nu must exceed R");
    if (h.SigmaL.rows() != h.R + 1 || h.SigmaL.cols() != h.R + 1)
        throw InvalidInput("SigmaL must be (R+1) x (R+1)");
    if (!isSpd(h.SigmaL)) throw InvalidInput("SigmaL must be symmetric positive definite");
    if (!(h.aDelta > 0.0) || !(h.bDelta > 0.0))
        throw InvalidInput("Beta prior parameters for Delta must be positive");
    if (h.zetaGrid.empty()) throw InvalidInput("zeta grid must not be empty");
    for (std::size_t k = 0; k < h.zetaGrid.size(); ++k) {
        if (!(h.zetaGrid[k] > 0.0) || !std::isfinite(h.zetaGrid[k]))
            throw InvalidInput("zeta grid values must be positive and finite");
        if (k > 0 && !(h.zetaGrid[k] > h.zetaGrid[k - 1]))
            throw InvalidInput("zeta grid must be strictly increasing (duplicate or unsorted value " +
                               std::to_string(h.zetaGrid[k]) + ")");
    }
    if (h.iterations < 1) throw InvalidInput("iterations must be positive");
    if (h.burnin < 0 || h.burnin >= h.iterations)
        throw InvalidInput("burnin must satisfy 0 <= burnin < iterations");
    if (h.jitter < 0.0) throw InvalidInput("jitter must be non-negative");
    if (h.interceptPrecision < 0.0 || h.auxPrecision < 0.0)
        throw InvalidInput("prior precisions must be non-negative");
}

std::vector<std::string> stateViolations(const ModelState& s, const Hyperparameters& h,
                                         const ModelVariant& variant) {
    std::vector<std::string> out;
    const int R = h.R;
    const int V = s.nodes();
    auto fail = [&](std::string msg) { out.push_back(std::move(msg)); };

    if (s.lambda.size() != R) fail("lambda length differs from R");
    if (s.pi.rows() != R || s.pi.cols() != 3) fail("pi must be R x 3");
    if (s.L.rows() != R + 1 || s.L.cols() != R + 1) fail("L must be (R+1) x (R+1)");
    if (s.xi.rows() != V || s.xi.cols() != R + 1) fail("xi must be V x (R+1)");
    if (s.gammaY.size() != s.gammaZ.size()) fail("gammaY and gammaZ lengths differ");
    if (!out.empty()) return out;

    if (!std::isfinite(s.muY) || !std::isfinite(s.muZ)) fail("non-finite intercept");
    if (!s.gammaY.allFinite() || !s.gammaZ.allFinite()) fail("non-finite auxiliary coefficient");
    if (!(s.tauY2 > 0.0) || !std::isfinite(s.tauY2)) fail("tauY2 must be positive");
    if (!(s.tauZ2 > 0.0) || !std::isfinite(s.tauZ2)) fail("tauZ2 must be positive");
    if (!(s.Delta > 0.0 && s.Delta < 1.0)) fail("Delta must lie in (0, 1)");
    if (!s.L.allFinite() || !isSpd(s.L)) fail("L must be symmetric positive definite");
    for (int r = 0; r < R; ++r) {
        const int l = s.lambda(r);
        if (l != -1 && l != 0 && l != 1) fail("lambda entry outside {-1, 0, 1}");
        if ((s.pi.row(r).array() < 0.0).any() || std::abs(s.pi.row(r).sum() - 1.0) > 1e-9)
            fail("pi row " + std::to_string(r) + " is not on the simplex");
    }
    if (!s.xi.allFinite()) fail("non-finite latent vector");
    for (int v = 0; v < V; ++v) {
        if (s.eta(v) != 0 && s.eta(v) != 1) fail("eta entry is not binary");
        if (s.eta(v) == 0 && (s.xi.row(v).array() != 0.0).any())
            fail("eta(" + std::to_string(v) + ") = 0 but xi is nonzero");
    }
    if (variant.spatial()) {
        const bool onGrid =
            s.zetaIndex >= 0 && s.zetaIndex < static_cast<int>(h.zetaGrid.size()) &&
            h.zetaGrid[s.zetaIndex] == s.zeta;
        if (!onGrid) fail("zeta is not the grid value at zetaIndex");
    }
    return out;
}

std::string datasetFingerprint(const Dataset& data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mixBytes = [&](const void* p, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t k = 0; k < len; ++k) {
            hash ^= bytes[k];
            hash *= 0x100000001b3ULL;
        }
    };
    auto mixInt = [&](std::int64_t v) { mixBytes(&v, sizeof v); };
    auto mixDouble = [&](double d) {
        if (d == 0.0) d = 0.0;  // fold -0.0
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        mixBytes(&bits, sizeof bits);
    };
    mixInt(data.n);
    mixInt(data.V);
    mixInt(data.q);
    for (const auto& M : data.networks)
        for (int u = 0; u < data.V; ++u)
            for (int v = u + 1; v < data.V; ++v) mixDouble(M(u, v));
    for (int i = 0; i < data.n; ++i) {
        for (int v = 0; v < data.V; ++v) mixDouble(data.attributes(i, v));
        mixDouble(data.predictor(i));
        for (int j = 0; j < data.q; ++j) mixDouble(data.auxiliaries(i, j));
    }
    for (int v = 0; v < data.V; ++v)
        for (int c = 0; c < 3; ++c) mixDouble(data.coords(v, c));

    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace sjm
