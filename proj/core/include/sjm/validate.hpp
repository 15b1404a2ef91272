#pragma once

#include <string>
#include <vector>

#include "sjm/types.hpp"

namespace sjm {

constexpr double kSymmetryTolerance = 1e-10;

/// Throws InvalidInput naming the first offending element. Checks shapes,
/// finiteness, network symmetry and zero diagonal (within kSymmetryTolerance),
/// and pairwise-distinct coordinates.
void validateDataset(const Dataset& data);

/// Throws InvalidInput on any invalid prior constant or sampler setting.
void validateHyperparameters(const Hyperparameters& hyper);

/// Empty when `state` satisfies every ModelState invariant, otherwise one
/// message per violation.
std::vector<std::string> stateViolations(const ModelState& state, const Hyperparameters& hyper,
                                         const ModelVariant& variant);

/// 64-bit FNV-1a content hash of the dataset, as 16 hex digits.
std::string datasetFingerprint(const Dataset& data);

}  // namespace sjm
