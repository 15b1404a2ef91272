#include "sjm/algebra.hpp"

#include <string>

#include "sjm/error.hpp"

namespace sjm {

namespace {

void requireLatentShape(const IntVector& lambda, const Matrix& xi) {
    if (xi.cols() != lambda.size() + 1) {
        throw InvalidInput("latent vectors have " + std::to_string(xi.cols()) +
                           " entries, expected R+1 = " + std::to_string(lambda.size() + 1));
    }
}

void requireStateMatchesData(const Dataset& data, const ModelState& state) {
    if (state.nodes() != data.V || state.xi.rows() != data.V) {
        throw InvalidInput("state has " + std::to_string(state.nodes()) + " nodes, data has " +
                           std::to_string(data.V));
    }
    if (state.gammaY.size() != data.q || state.gammaZ.size() != data.q) {
        throw InvalidInput("auxiliary coefficient length does not match q = " +
                           std::to_string(data.q));
    }
    requireLatentShape(state.lambda, state.xi);
}

}  // namespace

Vector vectorizeUpper(const Matrix& M) {
    const int V = static_cast<int>(M.rows());
    if (M.cols() != V) throw InvalidInput("vectorizeUpper expects a square matrix");
    Vector out(edgeCount(V));
    int k = 0;
    for (int u = 0; u < V; ++u)
        for (int v = u + 1; v < V; ++v) out(k++) = M(u, v);
    return out;
}

Matrix devectorizeUpper(const Vector& upper, int V) {
    if (upper.size() != edgeCount(V)) {
        throw InvalidInput("edge vector length " + std::to_string(upper.size()) +
                           " does not match V = " + std::to_string(V));
    }
    Matrix M = Matrix::Zero(V, V);
    int k = 0;
    for (int u = 0; u < V; ++u) {
        for (int v = u + 1; v < V; ++v) {
            M(u, v) = upper(k);
            M(v, u) = upper(k);
            ++k;
        }
    }
    return M;
}

std::vector<int> incidentEdges(int v, int V) {
    std::vector<int> out;
    out.reserve(V - 1);
    for (int u = 0; u < v; ++u) out.push_back(edgeIndex(u, v, V));
    for (int u = v + 1; u < V; ++u) out.push_back(edgeIndex(v, u, V));
    return out;
}

Matrix betaFromLatent(const IntVector& lambda, const Matrix& xi) {
    requireLatentShape(lambda, xi);
    const int R = static_cast<int>(lambda.size());
    const Matrix theta = xi.rightCols(R);
    Matrix B = theta * lambda.cast<double>().asDiagonal() * theta.transpose();
    // Symmetrize bitwise; the product is only symmetric up to rounding.
    for (int u = 0; u < B.rows(); ++u) {
        B(u, u) = 0.0;
        for (int v = u + 1; v < B.cols(); ++v) B(v, u) = B(u, v);
    }
    return B;
}

Vector betaUpper(const IntVector& lambda, const Matrix& xi) {
    return vectorizeUpper(betaFromLatent(lambda, xi));
}

Vector latentLayer(const Matrix& xi, int r) {
    const int V = static_cast<int>(xi.rows());
    Vector out(edgeCount(V));
    int k = 0;
    for (int u = 0; u < V; ++u) {
        const double tu = xi(u, r + 1);
        for (int v = u + 1; v < V; ++v) out(k++) = tu * xi(v, r + 1);
    }
    return out;
}

Matrix stackNetworks(const Dataset& data) {
    Matrix Y(data.n, edgeCount(data.V));
    for (int i = 0; i < data.n; ++i) Y.row(i) = vectorizeUpper(data.networks[i]).transpose();
    return Y;
}

Matrix networkResiduals(const Dataset& data, const ModelState& state) {
    requireStateMatchesData(data, state);
    const Vector beta = betaUpper(state.lambda, state.xi);
    Matrix out = stackNetworks(data);
    for (int i = 0; i < data.n; ++i) {
        const double shift = state.muY + data.auxiliaries.row(i).dot(state.gammaY);
        out.row(i).array() -= shift;
        out.row(i) -= data.predictor(i) * beta.transpose();
    }
    return out;
}

Matrix attributeResiduals(const Dataset& data, const ModelState& state) {
    requireStateMatchesData(data, state);
    const Vector alpha = state.alphaVector();
    Matrix out = data.attributes;
    for (int i = 0; i < data.n; ++i) {
        const double shift = state.muZ + data.auxiliaries.row(i).dot(state.gammaZ);
        out.row(i).array() -= shift;
        out.row(i) -= data.predictor(i) * alpha.transpose();
    }
    return out;
}

}  // namespace sjm
