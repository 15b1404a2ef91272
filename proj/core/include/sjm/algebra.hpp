#pragma once

#include <vector>

#include "sjm/types.hpp"

namespace sjm {

/// Number of node pairs u < v.
constexpr int edgeCount(int V) { return V * (V - 1) / 2; }

/// Position of pair (u, v), u < v, in the row-major upper-triangular order
/// (0,1), (0,2), ..., (0,V-1), (1,2), ...
constexpr int edgeIndex(int u, int v, int V) { return u * V - u * (u + 1) / 2 + (v - u - 1); }

/// Upper-triangular entries of a square matrix in edge order.
Vector vectorizeUpper(const Matrix& M);

/// Inverse of vectorizeUpper for symmetric zero-diagonal matrices.
Matrix devectorizeUpper(const Vector& upper, int V);

/// Edge positions of the pairs incident to node v, ordered
/// (0,v), ..., (v-1,v), (v,v+1), ..., (v,V-1).
std::vector<int> incidentEdges(int v, int V);

/// B(u,v) = sum_r lambda_r theta_r(u) theta_r(v) off the diagonal, zero on it.
/// Row v of `xi` is (alpha(v), theta(v)^T).
Matrix betaFromLatent(const IntVector& lambda, const Matrix& xi);

/// Edge-ordered vector of betaFromLatent.
Vector betaUpper(const IntVector& lambda, const Matrix& xi);

/// Edge-ordered layer theta_r(u) theta_r(v) for one latent dimension r (0-based).
Vector latentLayer(const Matrix& xi, int r);

/// Network data as an n x h matrix, row i = vectorizeUpper(networks[i]).
Matrix stackNetworks(const Dataset& data);

/// y_i - mu_y - beta x_i - w_i^T gamma_y, one row per subject (n x h).
Matrix networkResiduals(const Dataset& data, const ModelState& state);

/// z_i - mu_z - alpha x_i - w_i^T gamma_z, one row per subject (n x V).
Matrix attributeResiduals(const Dataset& data, const ModelState& state);

}  // namespace sjm
