#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sjm/harness.hpp"
#include "sjm/simulate.hpp"
#include "sjm/summarize.hpp"
#include "sjm/types.hpp"

namespace sjm::io {

namespace fs = std::filesystem;

constexpr int kFormatVersion = 1;

/// Edge storage inside a dataset directory. `LongEdges` writes edges.csv
/// with one (subject,u,v,value) row per upper-triangle entry; `PerSubject`
/// writes networks/subject_XXXX.csv as full V x V matrices.
enum class NetworkFormat { LongEdges, PerSubject };

/// Dataset directory: manifest.json, coords.csv, attributes.csv,
/// predictor.csv, auxiliaries.csv and the edges in `format`.
void writeDataset(const Dataset& data, const fs::path& dir, NetworkFormat format = NetworkFormat::LongEdges);

/// Throws InvalidInput naming the file and problem for missing files,
/// malformed rows, NaN values, asymmetric matrices or a manifest mismatch.
Dataset readDataset(const fs::path& dir);

/// truth.json holding the scenario settings and every true quantity.
void writeTruth(const GroundTruth& truth, const ScenarioConfig& cfg, const fs::path& dir);
GroundTruth readTruth(const fs::path& dir, ScenarioConfig* cfg = nullptr);

/// Chain directory: draws.csv (one row per stored state) and chain.json
/// (hyperparameters, variant, stream, fingerprint, data location).
void writeChain(const Chain& chain, const fs::path& dir, const std::string& dataPath = {});
Chain readChain(const fs::path& dir, std::string* dataPath = nullptr);

/// Wall-clock figures go to their own file so the other artifacts stay
/// byte-identical across reruns.
void writeTiming(const fs::path& file, double seconds);

struct SummaryArtifacts {
    PosteriorSummary summary;
    std::optional<SpatialCurve> curve;
    std::optional<Vector> crossCovariance;
    std::string fingerprint;
    const GroundTruth* truth = nullptr;
};

/// summary.json, inclusion.csv, beta.csv, alpha.csv and, when present,
/// spatial_curve.csv and cross_covariance.csv.
void writeSummary(const SummaryArtifacts& artifacts, const fs::path& dir);

/// report.json for a scenario comparison (runtimes excluded) and a sibling
/// timing.json.
void writeReport(const ReplicateReport& report, const fs::path& dir);

/// Flat versioned configuration document. Every key is optional apart from
/// "version"; unknown keys are rejected.
struct RunConfig {
    Hyperparameters hyper = Hyperparameters::defaults();
    std::optional<std::string> variant;
    std::optional<std::uint64_t> seed;
    std::optional<int> replicates;
    std::optional<int> threads;
    std::optional<double> level;
    std::optional<int> bins;
};

RunConfig parseRunConfig(const std::string& text, const std::string& origin = "config");
RunConfig readRunConfig(const fs::path& file);

/// Shortest decimal string that parses back to exactly `x`.
std::string formatDouble(double x);

}  // namespace sjm::io
