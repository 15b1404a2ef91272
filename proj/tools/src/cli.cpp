#include "sjm/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "sjm/error.hpp"
#include "sjm/harness.hpp"
#include "sjm/io.hpp"
#include "sjm/sampler.hpp"
#include "sjm/simulate.hpp"
#include "sjm/summarize.hpp"
#include "sjm/validate.hpp"

namespace sjm::cli {

namespace {

namespace fs = std::filesystem;

int defaultThreads() {
    if (const char* env = std::getenv("SJM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
        throw InvalidInput("SJM_THREADS must be a positive integer, got '" + std::string(env) + "'");
    }
    return 1;
}

// Options shared by commands that fit models.
struct ModelOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations, burnin, rank;
    std::optional<std::string> attributeUpdate, initialization;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "Flat JSON configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "Random seed");
        cmd->add_option("--iterations", iterations, "Total sweeps per chain");
        cmd->add_option("--burnin", burnin, "Sweeps discarded before storing draws");
        cmd->add_option("--rank", rank, "Latent rank R");
        cmd->add_option("--attribute-update", attributeUpdate, "whitened or independent");
        cmd->add_option("--init", initialization, "spectral or prior");
    }

    io::RunConfig resolve() const {
        io::RunConfig cfg = config.empty() ? io::RunConfig{} : io::readRunConfig(config);
        Hyperparameters& h = cfg.hyper;
        if (rank) {
            const Hyperparameters base = Hyperparameters::defaults(*rank);
            h.R = base.R;
            h.nu = base.nu;
            h.SigmaL = base.SigmaL;
        }
        if (iterations) h.iterations = *iterations;
        if (burnin) h.burnin = *burnin;
        if (attributeUpdate) {
            if (*attributeUpdate == "whitened") h.attributeUpdate = AttributeUpdate::Whitened;
            else if (*attributeUpdate == "independent") h.attributeUpdate = AttributeUpdate::Independent;
            else throw InvalidInput("--attribute-update must be 'whitened' or 'independent'");
        }
        if (initialization) {
            if (*initialization == "spectral") h.initialization = Initialization::Spectral;
            else if (*initialization == "prior") h.initialization = Initialization::Prior;
            else throw InvalidInput("--init must be 'spectral' or 'prior'");
        }
        if (seed) cfg.seed = *seed;
        h.seed = cfg.seed.value_or(1);
        validateHyperparameters(h);
        return cfg;
    }
};

int cmdScenarios(std::ostream& out) {
    out << "scenario  node_sparsity  zeta_star\n";
    for (const auto& c : builtinScenarios())
        out << std::setw(8) << c.id << "  " << std::setw(13) << c.sparsity << "  " << std::setw(9) << c.zetaStar
            << "\n";
    return kExitOk;
}

struct SimulateArgs {
    int scenario = 0;
    std::string out;
    std::uint64_t seed = 1;
    std::optional<int> n, V;
    std::string format = "long";
};

int cmdSimulate(const SimulateArgs& a, std::ostream& out) {
    ScenarioConfig cfg = scenario(a.scenario);
    cfg.seed = a.seed;
    if (a.n) cfg.n = *a.n;
    if (a.V) cfg.V = *a.V;
    io::NetworkFormat format;
    if (a.format == "long") format = io::NetworkFormat::LongEdges;
    else if (a.format == "matrices") format = io::NetworkFormat::PerSubject;
    else throw InvalidInput("--format must be 'long' or 'matrices'");

    Rng rng(cfg.seed, dataStream(cfg.id, 0));
    const GroundTruth truth = generateTruth(cfg, rng);
    const Dataset data = generateDataset(cfg, truth, rng);
    io::writeDataset(data, a.out, format);
    io::writeTruth(truth, cfg, a.out);
    out << "wrote scenario " << cfg.id << " (n=" << cfg.n << ", V=" << cfg.V << ", " << truth.etaStar.sum()
        << " active nodes) to " << a.out << "\n";
    return kExitOk;
}

struct FitArgs {
    std::string data, out, variant;
    ModelOptions model;
};

int cmdFit(const FitArgs& a, std::ostream& out) {
    const io::RunConfig cfg = a.model.resolve();
    const std::string variantName_ = !a.variant.empty() ? a.variant : cfg.variant.value_or("spatial-joint");
    const ModelVariant variant{parseVariant(variantName_)};
    const Dataset data = io::readDataset(a.data);

    Rng rng(cfg.hyper.seed, 0);
    const auto start = std::chrono::steady_clock::now();
    const Chain chain = runChain(data, cfg.hyper, rng, variant);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    io::writeChain(chain, a.out, fs::absolute(a.data).lexically_normal().string());
    io::writeTiming(fs::path(a.out) / "timing.json", seconds);
    out << "stored " << chain.states.size() << " draws of " << variantName(variant.kind) << " in " << a.out << "\n";
    return kExitOk;
}

struct SummarizeArgs {
    std::string chain, data, truth, out;
    std::optional<double> level;
    std::optional<int> bins;
    std::uint64_t seed = 1;
    double crossX = 1.0;
};

int cmdSummarize(const SummarizeArgs& a, std::ostream& out) {
    std::string recordedData;
    const Chain chain = io::readChain(a.chain, &recordedData);
    const std::string dataDir = !a.data.empty() ? a.data : recordedData;
    if (dataDir.empty()) throw InvalidInput("chain does not record its dataset; pass --data");
    const Dataset data = io::readDataset(dataDir);
    const std::string fingerprint = datasetFingerprint(data);
    if (fingerprint != chain.datasetFingerprint)
        throw InvalidInput("dataset " + dataDir + " (fingerprint " + fingerprint +
                           ") does not match the chain (fingerprint " + chain.datasetFingerprint + ")");

    io::SummaryArtifacts art;
    art.summary = coefficientSummary(chain, a.level.value_or(0.95));
    art.fingerprint = fingerprint;
    std::optional<GroundTruth> truth;
    if (!a.truth.empty()) {
        truth = io::readTruth(a.truth);
        if (truth->etaStar.size() != data.V) throw InvalidInput("truth does not match the dataset size");
        art.truth = &*truth;
    }
    if (chain.variant.usesAttribute()) {
        CurveOptions opts;
        if (a.bins) opts.bins = *a.bins;
        if (truth) opts.referenceZeta = truth->zetaStar;
        Rng rng(a.seed, 1);
        art.curve = spatialCorrelationCurve(chain, data, rng, opts);
        for (const auto& w : art.curve->warnings) out << "warning: " << w << "\n";
    }
    if (chain.variant.usesAttribute() && chain.variant.usesNetwork())
        art.crossCovariance = impliedCrossCovariance(chain, a.crossX);

    const std::string outDir = !a.out.empty() ? a.out : (fs::path(a.chain) / "summary").string();
    io::writeSummary(art, outDir);

    out << "node  P(eta=1)  selected\n";
    for (Eigen::Index v = 0; v < art.summary.inclusionProb.size(); ++v)
        out << std::setw(4) << v << "  " << std::fixed << std::setprecision(3) << std::setw(8)
            << art.summary.inclusionProb(v) << "  " << (art.summary.inclusionProb(v) > art.summary.threshold ? "yes" : "no")
            << "\n";
    out.unsetf(std::ios::floatfield);
    out << "summary written to " << outDir << "\n";
    return kExitOk;
}

struct CompareArgs {
    int scenario = 0;
    std::optional<int> replicates, threads;
    std::string out;
    std::vector<std::string> variants;
    ModelOptions model;
};

int cmdCompare(const CompareArgs& a, std::ostream& out) {
    const io::RunConfig cfg = a.model.resolve();
    ScenarioConfig sc = scenario(a.scenario);
    sc.seed = cfg.hyper.seed;

    ExperimentOptions opts;
    opts.hyper = cfg.hyper;
    opts.replicates = a.replicates.value_or(cfg.replicates.value_or(5));
    opts.parallelism = a.threads.value_or(cfg.threads.value_or(defaultThreads()));
    opts.level = cfg.level.value_or(0.95);
    if (!a.variants.empty()) {
        opts.variants.clear();
        for (const auto& v : a.variants) opts.variants.push_back(parseVariant(v));
    }
    if (opts.parallelism < 1) throw InvalidInput("thread count must be positive");

    const ReplicateReport report = runScenario(sc, opts);
    const std::string outDir = !a.out.empty() ? a.out : "compare_scenario_" + std::to_string(sc.id);
    io::writeReport(report, outDir);

    out << "scenario " << sc.id << ", " << opts.replicates << " replicates\n";
    out << "variant               ok  mse_beta      mse_alpha     cover_beta  cover_alpha\n";
    for (const auto& g : report.aggregates)
        out << std::left << std::setw(20) << variantName(g.kind) << std::right << std::setw(4) << g.succeeded
            << "  " << std::setw(12) << std::setprecision(4) << g.mseBeta.mean << "  " << std::setw(12)
            << g.mseAlpha.mean << "  " << std::setw(10) << g.coverageBeta.mean << "  " << std::setw(11)
            << g.coverageAlpha.mean << "\n";
    for (const auto& rep : report.replicates)
        for (const auto& r : rep.variants)
            if (!r.ok) out << "replicate " << rep.replicate << " " << variantName(r.kind) << " failed: " << r.error << "\n";
    out << "report written to " << outDir << "\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Joint network and nodal-attribute regression with spatial effects"};
    app.require_subcommand(1);

    app.add_subcommand("scenarios", "List the built-in simulation scenarios");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate a dataset and its ground truth");
    simulate->add_option("--scenario", sim.scenario, "Scenario id (1-7)")->required();
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--subjects", sim.n, "Override the subject count");
    simulate->add_option("--nodes", sim.V, "Override the node count");
    simulate->add_option("--format", sim.format, "Edge storage: long or matrices");

    FitArgs fit;
    auto* fitCmd = app.add_subcommand("fit", "Run the Gibbs sampler on a dataset");
    fitCmd->add_option("--data", fit.data, "Dataset directory")->required();
    fitCmd->add_option("--out", fit.out, "Chain output directory")->required();
    fitCmd->add_option("--variant", fit.variant,
                       "spatial-joint, nonspatial-joint, independent-network or independent-attribute");
    fit.model.attach(fitCmd);

    SummarizeArgs sum;
    auto* summarize = app.add_subcommand("summarize", "Summarize a stored chain");
    summarize->add_option("--chain", sum.chain, "Chain directory")->required();
    summarize->add_option("--data", sum.data, "Dataset directory (defaults to the one recorded in the chain)");
    summarize->add_option("--truth", sum.truth, "Directory holding truth.json");
    summarize->add_option("--out", sum.out, "Output directory (default CHAIN/summary)");
    summarize->add_option("--level", sum.level, "Credible level");
    summarize->add_option("--bins", sum.bins, "Distance bins for the spatial curve");
    summarize->add_option("--seed", sum.seed, "Random seed for predictive draws");
    summarize->add_option("--cross-x", sum.crossX, "Predictor value for the implied cross-covariance");

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Replicated comparison of model variants on a scenario");
    compare->add_option("--scenario", cmp.scenario, "Scenario id (1-7)")->required();
    compare->add_option("--replicates", cmp.replicates, "Replicate count");
    compare->add_option("--threads", cmp.threads, "Worker threads (default SJM_THREADS or 1)");
    compare->add_option("--out", cmp.out, "Report directory");
    compare->add_option("--variants", cmp.variants, "Variants to fit")->delimiter(',');
    cmp.model.attach(compare);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (app.got_subcommand("scenarios")) return cmdScenarios(out);
        if (app.got_subcommand(simulate)) return cmdSimulate(sim, out);
        if (app.got_subcommand(fitCmd)) return cmdFit(fit, out);
        if (app.got_subcommand(summarize)) return cmdSummarize(sum, out);
        if (app.got_subcommand(compare)) return cmdCompare(cmp, out);
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

}  // namespace sjm::cli
