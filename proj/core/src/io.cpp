#include "sjm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "sjm/algebra.hpp"
#include "sjm/error.hpp"
#include "sjm/validate.hpp"

namespace sjm::io {

using json = nlohmann::json;

std::string formatDouble(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

// ---- text files ----------------------------------------------------------

std::string readText(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InvalidInput(file.string() + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeText(const fs::path& file, const std::string& text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput(file.string() + ": cannot open for writing");
    out << text;
    if (!out) throw InvalidInput(file.string() + ": write failed");
}

json readJson(const fs::path& file) {
    try {
        return json::parse(readText(file));
    } catch (const json::exception& e) {
        throw InvalidInput(file.string() + ": malformed JSON (" + e.what() + ")");
    }
}

void writeJson(const fs::path& file, const json& j) { writeText(file, j.dump(2) + "\n"); }

// ---- CSV -----------------------------------------------------------------

struct Csv {
    fs::path file;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<int> lines;  // source line of each row
};

std::vector<std::string> splitCells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Csv readCsv(const fs::path& file, bool hasHeader) {
    std::ifstream in(file);
    if (!in) throw InvalidInput(file.string() + ": cannot open for reading");
    Csv csv;
    csv.file = file;
    std::string line;
    int lineNo = 0;
    if (hasHeader) {
        if (!std::getline(in, line)) throw InvalidInput(file.string() + ": missing header row");
        ++lineNo;
        for (auto& c : splitCells(line)) csv.header.push_back(trim(c));
    }
    while (std::getline(in, line)) {
        ++lineNo;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        int col = 0;
        for (const auto& raw : splitCells(line)) {
            ++col;
            const std::string cell = trim(raw);
            char* end = nullptr;
            const double x = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size())
                throw InvalidInput(file.string() + ":" + std::to_string(lineNo) + ": column " +
                                   std::to_string(col) + " is not a number ('" + cell + "')");
            if (!std::isfinite(x))
                throw InvalidInput(file.string() + ":" + std::to_string(lineNo) + ": column " +
                                   std::to_string(col) + " is not finite");
            row.push_back(x);
        }
        csv.rows.push_back(std::move(row));
        csv.lines.push_back(lineNo);
    }
    return csv;
}

std::string where(const Csv& csv, std::size_t row) {
    return csv.file.string() + ":" + std::to_string(csv.lines[row]);
}

void expectShape(const Csv& csv, std::size_t rows, std::size_t cols) {
    if (csv.rows.size() != rows)
        throw InvalidInput(csv.file.string() + ": expected " + std::to_string(rows) + " data rows, found " +
                           std::to_string(csv.rows.size()));
    for (std::size_t r = 0; r < csv.rows.size(); ++r)
        if (csv.rows[r].size() != cols)
            throw InvalidInput(where(csv, r) + ": expected " + std::to_string(cols) + " columns, found " +
                               std::to_string(csv.rows[r].size()));
}

int asIndex(const Csv& csv, std::size_t row, std::size_t col, int bound, const char* what) {
    const double x = csv.rows[row][col];
    if (x != std::floor(x) || x < 0 || x >= bound)
        throw InvalidInput(where(csv, row) + ": " + what + " must be an integer in [0, " +
                           std::to_string(bound) + ")");
    return static_cast<int>(x);
}

class CsvWriter {
public:
    void cell(double x) {
        sep();
        out_ += formatDouble(x);
    }
    void cell(long long x) {
        sep();
        out_ += std::to_string(x);
    }
    void cell(int x) { cell(static_cast<long long>(x)); }
    void cell(const std::string& s) {
        sep();
        out_ += s;
    }
    void endRow() {
        out_ += '\n';
        first_ = true;
    }
    const std::string& str() const { return out_; }

private:
    void sep() {
        if (!first_) out_ += ',';
        first_ = false;
    }
    std::string out_;
    bool first_ = true;
};

// ---- JSON helpers --------------------------------------------------------

json toJson(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json toJson(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
json toJson(const IntVector& v) { return std::vector<int>(v.data(), v.data() + v.size()); }

template <class F>
auto guarded(const std::string& origin, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InvalidInput(origin + ": " + e.what());
    }
}

Matrix matrixFromJson(const json& j, const std::string& what) {
    if (!j.is_array()) throw InvalidInput(what + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw InvalidInput(what + " has ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

Vector vectorFromJson(const json& j) {
    const auto xs = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

IntVector intVectorFromJson(const json& j) {
    const auto xs = j.get<std::vector<int>>();
    return Eigen::Map<const IntVector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

void checkHeader(const json& j, const std::string& format, const fs::path& file) {
    if (!j.is_object() || j.value("format", std::string{}) != format)
        throw InvalidInput(file.string() + ": not an " + format + " file");
    if (j.value("version", -1) != kFormatVersion)
        throw InvalidInput(file.string() + ": unsupported version (expected " + std::to_string(kFormatVersion) +
                           ")");
}

const char* attributeUpdateName(AttributeUpdate u) {
    return u == AttributeUpdate::Whitened ? "whitened" : "independent";
}

const char* initializationName(Initialization i) {
    return i == Initialization::Spectral ? "spectral" : "prior";
}

Initialization parseInitialization(const std::string& s) {
    if (s == "spectral") return Initialization::Spectral;
    if (s == "prior") return Initialization::Prior;
    throw InvalidInput("initialization must be 'spectral' or 'prior', got '" + s + "'");
}

AttributeUpdate parseAttributeUpdate(const std::string& s) {
    if (s == "whitened") return AttributeUpdate::Whitened;
    if (s == "independent") return AttributeUpdate::Independent;
    throw InvalidInput("attribute_update must be 'whitened' or 'independent', got '" + s + "'");
}

json hyperToJson(const Hyperparameters& h) {
    return json{{"R", h.R},
                {"xi_exponent", h.xiExp},
                {"a", h.a},
                {"b", h.b},
                {"nu", h.nu},
                {"sigma_l", toJson(h.SigmaL)},
                {"a_delta", h.aDelta},
                {"b_delta", h.bDelta},
                {"zeta_grid", h.zetaGrid},
                {"iterations", h.iterations},
                {"burnin", h.burnin},
                {"seed", h.seed},
                {"jitter", h.jitter},
                {"attribute_update", attributeUpdateName(h.attributeUpdate)},
                {"initialization", initializationName(h.initialization)},
                {"intercept_precision", h.interceptPrecision},
                {"aux_precision", h.auxPrecision}};
}

// Applies hyperparameter keys from `j`; returns false for keys it does not own.
bool applyHyperKey(Hyperparameters& h, const std::string& key, const json& v) {
    if (key == "R") return true;  // handled first by the caller
    if (key == "xi_exponent") h.xiExp = v.get<double>();
    else if (key == "a") h.a = v.get<double>();
    else if (key == "b") h.b = v.get<double>();
    else if (key == "nu") h.nu = v.get<double>();
    else if (key == "sigma_l") {
        if (v.is_number()) {
            h.SigmaL = v.get<double>() * Matrix::Identity(h.R + 1, h.R + 1);
        } else {
            h.SigmaL = matrixFromJson(v, "sigma_l");
        }
    } else if (key == "a_delta") h.aDelta = v.get<double>();
    else if (key == "b_delta") h.bDelta = v.get<double>();
    else if (key == "zeta_grid") h.zetaGrid = v.get<std::vector<double>>();
    else if (key == "iterations") h.iterations = v.get<int>();
    else if (key == "burnin") h.burnin = v.get<int>();
    else if (key == "seed") h.seed = v.get<std::uint64_t>();
    else if (key == "jitter") h.jitter = v.get<double>();
    else if (key == "attribute_update") h.attributeUpdate = parseAttributeUpdate(v.get<std::string>());
    else if (key == "initialization") h.initialization = parseInitialization(v.get<std::string>());
    else if (key == "intercept_precision") h.interceptPrecision = v.get<double>();
    else if (key == "aux_precision") h.auxPrecision = v.get<double>();
    else return false;
    return true;
}

Hyperparameters hyperFromJson(const json& j, const std::string& origin) {
    return guarded(origin, [&] {
        Hyperparameters h = Hyperparameters::defaults(j.at("R").get<int>());
        for (const auto& [key, v] : j.items())
            if (!applyHyperKey(h, key, v)) throw InvalidInput(origin + ": unknown hyperparameter '" + key + "'");
        return h;
    });
}

json scenarioToJson(const ScenarioConfig& c) {
    return json{{"id", c.id},
                {"sparsity", c.sparsity},
                {"zeta_star", c.zetaStar},
                {"n", c.n},
                {"V", c.V},
                {"q", c.q},
                {"R_star", c.Rstar},
                {"tau2_y_star", c.tauY2Star},
                {"tau2_z_star", c.tauZ2Star},
                {"gamma_y_star", toJson(c.gammaYStar)},
                {"gamma_z_star", toJson(c.gammaZStar)},
                {"mu_y_star", c.muYStar},
                {"mu_z_star", c.muZStar},
                {"seed", c.seed}};
}

ScenarioConfig scenarioFromJson(const json& j) {
    ScenarioConfig c;
    c.id = j.at("id").get<int>();
    c.sparsity = j.at("sparsity").get<double>();
    c.zetaStar = j.at("zeta_star").get<double>();
    c.n = j.at("n").get<int>();
    c.V = j.at("V").get<int>();
    c.q = j.at("q").get<int>();
    c.Rstar = j.at("R_star").get<int>();
    c.tauY2Star = j.at("tau2_y_star").get<double>();
    c.tauZ2Star = j.at("tau2_z_star").get<double>();
    c.gammaYStar = vectorFromJson(j.at("gamma_y_star"));
    c.gammaZStar = vectorFromJson(j.at("gamma_z_star"));
    c.muYStar = j.at("mu_y_star").get<double>();
    c.muZStar = j.at("mu_z_star").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

std::string subjectFile(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "subject_%04d.csv", i);
    return buf;
}

// ---- chain columns -------------------------------------------------------

struct Dims {
    int R, V, q;
};

std::vector<std::string> chainColumns(const Dims& d) {
    std::vector<std::string> c{"mu_y", "mu_z"};
    for (int j = 0; j < d.q; ++j) c.push_back("gamma_y_" + std::to_string(j));
    for (int j = 0; j < d.q; ++j) c.push_back("gamma_z_" + std::to_string(j));
    for (const char* s : {"tau2_y", "tau2_z", "Delta", "zeta", "zeta_index"}) c.emplace_back(s);
    for (int r = 0; r < d.R; ++r) c.push_back("lambda_" + std::to_string(r));
    for (int r = 0; r < d.R; ++r)
        for (const char* k : {"0", "1", "m1"}) c.push_back("pi_" + std::to_string(r) + "_" + k);
    for (int v = 0; v < d.V; ++v) c.push_back("eta_" + std::to_string(v));
    for (int v = 0; v < d.V; ++v)
        for (int k = 0; k <= d.R; ++k) c.push_back("xi_" + std::to_string(v) + "_" + std::to_string(k));
    for (int a = 0; a <= d.R; ++a)
        for (int b = 0; b <= d.R; ++b) c.push_back("L_" + std::to_string(a) + "_" + std::to_string(b));
    return c;
}

void writeState(CsvWriter& w, const ModelState& s) {
    w.cell(s.muY);
    w.cell(s.muZ);
    for (Eigen::Index j = 0; j < s.gammaY.size(); ++j) w.cell(s.gammaY(j));
    for (Eigen::Index j = 0; j < s.gammaZ.size(); ++j) w.cell(s.gammaZ(j));
    w.cell(s.tauY2);
    w.cell(s.tauZ2);
    w.cell(s.Delta);
    w.cell(s.zeta);
    w.cell(s.zetaIndex);
    for (int r = 0; r < s.rank(); ++r) w.cell(s.lambda(r));
    for (int r = 0; r < s.rank(); ++r)
        for (int k = 0; k < 3; ++k) w.cell(s.pi(r, k));
    for (int v = 0; v < s.nodes(); ++v) w.cell(s.eta(v));
    for (int v = 0; v < s.nodes(); ++v)
        for (Eigen::Index k = 0; k < s.xi.cols(); ++k) w.cell(s.xi(v, k));
    for (Eigen::Index a = 0; a < s.L.rows(); ++a)
        for (Eigen::Index b = 0; b < s.L.cols(); ++b) w.cell(s.L(a, b));
    w.endRow();
}

ModelState readState(const std::vector<double>& row, const Dims& d) {
    std::size_t k = 0;
    auto next = [&] { return row[k++]; };
    auto nextInt = [&] { return static_cast<int>(std::lround(next())); };
    ModelState s;
    s.muY = next();
    s.muZ = next();
    s.gammaY.resize(d.q);
    s.gammaZ.resize(d.q);
    for (int j = 0; j < d.q; ++j) s.gammaY(j) = next();
    for (int j = 0; j < d.q; ++j) s.gammaZ(j) = next();
    s.tauY2 = next();
    s.tauZ2 = next();
    s.Delta = next();
    s.zeta = next();
    s.zetaIndex = nextInt();
    s.lambda.resize(d.R);
    for (int r = 0; r < d.R; ++r) s.lambda(r) = nextInt();
    s.pi.resize(d.R, 3);
    for (int r = 0; r < d.R; ++r)
        for (int c = 0; c < 3; ++c) s.pi(r, c) = next();
    s.eta.resize(d.V);
    for (int v = 0; v < d.V; ++v) s.eta(v) = nextInt();
    s.xi.resize(d.V, d.R + 1);
    for (int v = 0; v < d.V; ++v)
        for (int c = 0; c <= d.R; ++c) s.xi(v, c) = next();
    s.L.resize(d.R + 1, d.R + 1);
    for (int a = 0; a <= d.R; ++a)
        for (int b = 0; b <= d.R; ++b) s.L(a, b) = next();
    return s;
}

json aggregateToJson(const MetricAggregate& m) {
    return json{{"mean", m.mean}, {"se", m.se}, {"count", m.count}};
}

}  // namespace

// ---- datasets ------------------------------------------------------------

void writeDataset(const Dataset& data, const fs::path& dir, NetworkFormat format) {
    validateDataset(data);
    fs::create_directories(dir);
    const bool longFormat = format == NetworkFormat::LongEdges;
    writeJson(dir / "manifest.json", json{{"format", "sjm-dataset"},
                                          {"version", kFormatVersion},
                                          {"n", data.n},
                                          {"V", data.V},
                                          {"q", data.q},
                                          {"networks", longFormat ? "long" : "matrices"}});

    CsvWriter coords;
    for (const char* h : {"id", "x", "y", "z"}) coords.cell(std::string(h));
    coords.endRow();
    for (int v = 0; v < data.V; ++v) {
        coords.cell(v);
        for (int c = 0; c < 3; ++c) coords.cell(data.coords(v, c));
        coords.endRow();
    }
    writeText(dir / "coords.csv", coords.str());

    auto subjectTable = [&](const std::string& prefix, const Matrix& m) {
        CsvWriter w;
        w.cell(std::string("subject"));
        for (Eigen::Index c = 0; c < m.cols(); ++c) w.cell(prefix + std::to_string(c));
        w.endRow();
        for (int i = 0; i < data.n; ++i) {
            w.cell(i);
            for (Eigen::Index c = 0; c < m.cols(); ++c) w.cell(m(i, c));
            w.endRow();
        }
        return w.str();
    };
    writeText(dir / "attributes.csv", subjectTable("z_", data.attributes));
    writeText(dir / "predictor.csv", subjectTable("x_", Matrix(data.predictor)));
    writeText(dir / "auxiliaries.csv", subjectTable("w_", data.auxiliaries));

    if (longFormat) {
        CsvWriter w;
        for (const char* h : {"subject", "u", "v", "value"}) w.cell(std::string(h));
        w.endRow();
        for (int i = 0; i < data.n; ++i) {
            const Matrix& Y = data.networks[static_cast<std::size_t>(i)];
            for (int u = 0; u < data.V; ++u)
                for (int v = u + 1; v < data.V; ++v) {
                    w.cell(i);
                    w.cell(u);
                    w.cell(v);
                    w.cell(Y(u, v));
                    w.endRow();
                }
        }
        writeText(dir / "edges.csv", w.str());
    } else {
        fs::create_directories(dir / "networks");
        for (int i = 0; i < data.n; ++i) {
            const Matrix& Y = data.networks[static_cast<std::size_t>(i)];
            CsvWriter w;
            for (int u = 0; u < data.V; ++u) {
                for (int v = 0; v < data.V; ++v) w.cell(Y(u, v));
                w.endRow();
            }
            writeText(dir / "networks" / subjectFile(i), w.str());
        }
    }
}

Dataset readDataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InvalidInput(dir.string() + ": dataset directory not found");
    const fs::path manifestPath = dir / "manifest.json";
    const json manifest = readJson(manifestPath);
    checkHeader(manifest, "sjm-dataset", manifestPath);

    Dataset d;
    std::string networks;
    guarded(manifestPath.string(), [&] {
        d.n = manifest.at("n").get<int>();
        d.V = manifest.at("V").get<int>();
        d.q = manifest.at("q").get<int>();
        networks = manifest.at("networks").get<std::string>();
        return 0;
    });
    if (d.n < 1 || d.V < 2 || d.q < 0) throw InvalidInput(manifestPath.string() + ": invalid dimensions");
    const auto n = static_cast<std::size_t>(d.n);
    const auto V = static_cast<std::size_t>(d.V);

    const Csv coords = readCsv(dir / "coords.csv", true);
    expectShape(coords, V, 4);
    d.coords.resize(d.V, 3);
    for (std::size_t r = 0; r < V; ++r) {
        const int id = asIndex(coords, r, 0, d.V, "node id");
        if (id != static_cast<int>(r)) throw InvalidInput(where(coords, r) + ": node ids must be 0..V-1 in order");
        for (int c = 0; c < 3; ++c) d.coords(id, c) = coords.rows[r][static_cast<std::size_t>(c) + 1];
    }

    auto subjectTable = [&](const std::string& name, std::size_t cols) {
        const Csv csv = readCsv(dir / name, true);
        expectShape(csv, n, cols + 1);
        Matrix m(d.n, static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < n; ++r) {
            if (asIndex(csv, r, 0, d.n, "subject") != static_cast<int>(r))
                throw InvalidInput(where(csv, r) + ": subjects must be 0..n-1 in order");
            for (std::size_t c = 0; c < cols; ++c)
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = csv.rows[r][c + 1];
        }
        return m;
    };
    d.attributes = subjectTable("attributes.csv", V);
    d.predictor = subjectTable("predictor.csv", 1).col(0);
    d.auxiliaries = subjectTable("auxiliaries.csv", static_cast<std::size_t>(d.q));

    d.networks.assign(n, Matrix::Zero(d.V, d.V));
    if (networks == "long") {
        const Csv edges = readCsv(dir / "edges.csv", true);
        const std::size_t h = static_cast<std::size_t>(edgeCount(d.V));
        expectShape(edges, n * h, 4);
        std::vector<char> seen(n * h, 0);
        for (std::size_t r = 0; r < edges.rows.size(); ++r) {
            const int i = asIndex(edges, r, 0, d.n, "subject");
            const int u = asIndex(edges, r, 1, d.V, "u");
            const int v = asIndex(edges, r, 2, d.V, "v");
            if (u >= v) throw InvalidInput(where(edges, r) + ": edges must satisfy u < v");
            char& flag = seen[static_cast<std::size_t>(i) * h + static_cast<std::size_t>(edgeIndex(u, v, d.V))];
            if (flag)
                throw InvalidInput(where(edges, r) + ": duplicate edge (subject " + std::to_string(i) + ", " +
                                   std::to_string(u) + ", " + std::to_string(v) + ")");
            flag = 1;
            Matrix& Y = d.networks[static_cast<std::size_t>(i)];
            Y(u, v) = edges.rows[r][3];
            Y(v, u) = edges.rows[r][3];
        }
    } else if (networks == "matrices") {
        for (std::size_t i = 0; i < n; ++i) {
            const Csv m = readCsv(dir / "networks" / subjectFile(static_cast<int>(i)), false);
            expectShape(m, V, V);
            Matrix& Y = d.networks[i];
            for (std::size_t u = 0; u < V; ++u)
                for (std::size_t v = 0; v < V; ++v)
                    Y(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = m.rows[u][v];
        }
    } else {
        throw InvalidInput(manifestPath.string() + ": unknown network format '" + networks + "'");
    }

    validateDataset(d);
    // Tolerated asymmetry is resolved toward the upper triangle.
    for (auto& Y : d.networks) Y.triangularView<Eigen::StrictlyLower>() = Y.transpose();
    return d;
}

// ---- truth ---------------------------------------------------------------

void writeTruth(const GroundTruth& t, const ScenarioConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    writeJson(dir / "truth.json", json{{"format", "sjm-truth"},
                                       {"version", kFormatVersion},
                                       {"scenario", scenarioToJson(cfg)},
                                       {"zeta_star", t.zetaStar},
                                       {"eta_star", toJson(t.etaStar)},
                                       {"xi_star", toJson(t.xiStar)},
                                       {"L_star", toJson(t.Lstar)},
                                       {"beta_star", toJson(t.betaStar)},
                                       {"coords", toJson(t.coords)},
                                       {"delta_star", toJson(t.deltaStar)}});
}

GroundTruth readTruth(const fs::path& dir, ScenarioConfig* cfg) {
    const fs::path file = dir / "truth.json";
    const json j = readJson(file);
    checkHeader(j, "sjm-truth", file);
    return guarded(file.string(), [&] {
        GroundTruth t;
        t.zetaStar = j.at("zeta_star").get<double>();
        t.etaStar = intVectorFromJson(j.at("eta_star"));
        t.xiStar = matrixFromJson(j.at("xi_star"), "xi_star");
        t.Lstar = matrixFromJson(j.at("L_star"), "L_star");
        t.betaStar = matrixFromJson(j.at("beta_star"), "beta_star");
        t.coords = matrixFromJson(j.at("coords"), "coords");
        t.deltaStar = matrixFromJson(j.at("delta_star"), "delta_star");
        if (cfg) *cfg = scenarioFromJson(j.at("scenario"));
        return t;
    });
}

// ---- chains --------------------------------------------------------------

void writeChain(const Chain& chain, const fs::path& dir, const std::string& dataPath) {
    if (chain.states.empty()) throw InvalidInput("refusing to write a chain with no stored draws");
    fs::create_directories(dir);
    const ModelState& first = chain.states.front();
    const Dims d{first.rank(), first.nodes(), static_cast<int>(first.gammaY.size())};

    CsvWriter w;
    for (const auto& c : chainColumns(d)) w.cell(c);
    w.endRow();
    for (const auto& s : chain.states) writeState(w, s);
    writeText(dir / "draws.csv", w.str());

    writeJson(dir / "chain.json", json{{"format", "sjm-chain"},
                                       {"version", kFormatVersion},
                                       {"variant", variantName(chain.variant.kind)},
                                       {"stream", chain.streamId},
                                       {"fingerprint", chain.datasetFingerprint},
                                       {"data", dataPath},
                                       {"draws", chain.states.size()},
                                       {"R", d.R},
                                       {"V", d.V},
                                       {"q", d.q},
                                       {"hyperparameters", hyperToJson(chain.hyper)}});
}

Chain readChain(const fs::path& dir, std::string* dataPath) {
    const fs::path metaPath = dir / "chain.json";
    const json meta = readJson(metaPath);
    checkHeader(meta, "sjm-chain", metaPath);
    Chain chain;
    Dims d{};
    std::size_t draws = 0;
    guarded(metaPath.string(), [&] {
        chain.variant.kind = parseVariant(meta.at("variant").get<std::string>());
        chain.streamId = meta.at("stream").get<std::uint64_t>();
        chain.datasetFingerprint = meta.at("fingerprint").get<std::string>();
        if (dataPath) *dataPath = meta.at("data").get<std::string>();
        draws = meta.at("draws").get<std::size_t>();
        d = Dims{meta.at("R").get<int>(), meta.at("V").get<int>(), meta.at("q").get<int>()};
        return 0;
    });
    chain.hyper = hyperFromJson(meta.at("hyperparameters"), metaPath.string());

    const Csv csv = readCsv(dir / "draws.csv", true);
    const auto columns = chainColumns(d);
    if (csv.header != columns) throw InvalidInput((dir / "draws.csv").string() + ": header does not match chain.json");
    expectShape(csv, draws, columns.size());
    chain.states.reserve(draws);
    for (const auto& row : csv.rows) chain.states.push_back(readState(row, d));
    return chain;
}

void writeTiming(const fs::path& file, double seconds) {
    writeJson(file, json{{"wall_clock_seconds", seconds}});
}

// ---- summaries and reports -----------------------------------------------

void writeSummary(const SummaryArtifacts& art, const fs::path& dir) {
    fs::create_directories(dir);
    const PosteriorSummary& s = art.summary;
    const GroundTruth* t = art.truth;

    json scalars = json::array();
    for (const auto& sc : s.scalars)
        scalars.push_back(
            json{{"name", sc.name}, {"mean", sc.mean}, {"lower", sc.lower}, {"upper", sc.upper}, {"ess", sc.ess}});
    json j{{"format", "sjm-summary"},
           {"version", kFormatVersion},
           {"fingerprint", art.fingerprint},
           {"level", s.level},
           {"threshold", s.threshold},
           {"draws", s.draws},
           {"selected", s.selectedNodes},
           {"tied", s.tiedNodes},
           {"scalars", scalars}};
    if (t) {
        const SelectionRates rates = selectionRates(s.inclusionProb, t->etaStar, s.threshold);
        j["truth"] = json{{"scaled_mse_beta", scaledMseUpper(s.betaMean, t->betaStar)},
                          {"scaled_mse_alpha", scaledMse(s.alphaMean, t->alphaStar())},
                          {"coverage_beta", betaIntervalMetrics(s, t->betaStar).coverage},
                          {"coverage_alpha", alphaIntervalMetrics(s, t->alphaStar()).coverage},
                          {"true_positive_rate", rates.truePositive},
                          {"false_positive_rate", rates.falsePositive}};
    }
    writeJson(dir / "summary.json", j);

    const int V = static_cast<int>(s.inclusionProb.size());
    CsvWriter inc;
    for (const char* h : {"node", "probability", "selected"}) inc.cell(std::string(h));
    if (t) inc.cell(std::string("eta_star"));
    inc.endRow();
    for (int v = 0; v < V; ++v) {
        inc.cell(v);
        inc.cell(s.inclusionProb(v));
        inc.cell(s.inclusionProb(v) > s.threshold ? 1 : 0);
        if (t) inc.cell(t->etaStar(v));
        inc.endRow();
    }
    writeText(dir / "inclusion.csv", inc.str());

    CsvWriter beta;
    for (const char* h : {"u", "v", "mean", "lower", "upper"}) beta.cell(std::string(h));
    if (t) beta.cell(std::string("truth"));
    beta.endRow();
    for (int u = 0; u < V; ++u)
        for (int v = u + 1; v < V; ++v) {
            beta.cell(u);
            beta.cell(v);
            beta.cell(s.betaMean(u, v));
            beta.cell(s.betaLower(u, v));
            beta.cell(s.betaUpper(u, v));
            if (t) beta.cell(t->betaStar(u, v));
            beta.endRow();
        }
    writeText(dir / "beta.csv", beta.str());

    CsvWriter alpha;
    for (const char* h : {"node", "mean", "lower", "upper"}) alpha.cell(std::string(h));
    if (t) alpha.cell(std::string("truth"));
    alpha.endRow();
    for (int v = 0; v < V; ++v) {
        alpha.cell(v);
        alpha.cell(s.alphaMean(v));
        alpha.cell(s.alphaLower(v));
        alpha.cell(s.alphaUpper(v));
        if (t) alpha.cell(t->xiStar(v, 0));
        alpha.endRow();
    }
    writeText(dir / "alpha.csv", alpha.str());

    if (art.curve) {
        CsvWriter c;
        for (const char* h : {"lower", "upper", "midpoint", "pairs", "correlation", "reference"})
            c.cell(std::string(h));
        c.endRow();
        auto row = [&](const SpatialBin& b) {
            c.cell(b.lower);
            c.cell(b.upper);
            c.cell(b.midpoint);
            c.cell(b.count);
            c.cell(b.correlation);
            c.cell(b.reference ? formatDouble(*b.reference) : std::string("NA"));
            c.endRow();
        };
        row(art.curve->self);
        for (const auto& b : art.curve->bins) row(b);
        writeText(dir / "spatial_curve.csv", c.str());
    }

    if (art.crossCovariance) {
        CsvWriter c;
        c.cell(std::string("component"));
        c.cell(std::string("covariance"));
        c.endRow();
        for (Eigen::Index r = 0; r < art.crossCovariance->size(); ++r) {
            c.cell(static_cast<int>(r));
            c.cell((*art.crossCovariance)(r));
            c.endRow();
        }
        writeText(dir / "cross_covariance.csv", c.str());
    }
}

void writeReport(const ReplicateReport& report, const fs::path& dir) {
    fs::create_directories(dir);
    json variants = json::array();
    for (VariantKind k : report.variants) variants.push_back(variantName(k));

    json reps = json::array();
    json timing = json::array();
    for (const auto& rep : report.replicates) {
        json fits = json::array();
        json times = json::object();
        for (const auto& r : rep.variants) {
            json f{{"variant", variantName(r.kind)}, {"ok", r.ok}};
            if (r.ok) {
                f["mse_beta"] = r.mseBeta;
                f["mse_alpha"] = r.mseAlpha;
                f["coverage_beta"] = r.betaInterval.coverage;
                f["length_beta"] = r.betaInterval.meanLength;
                f["coverage_alpha"] = r.alphaInterval.coverage;
                f["length_alpha"] = r.alphaInterval.meanLength;
                f["true_positive_rate"] = r.selection.truePositive;
                f["false_positive_rate"] = r.selection.falsePositive;
                f["inclusion"] = toJson(r.inclusionProb);
            } else {
                f["error"] = r.error;
            }
            fits.push_back(std::move(f));
            times[variantName(r.kind)] = r.runtime;
        }
        reps.push_back(json{{"replicate", rep.replicate}, {"eta_star", toJson(rep.etaStar)}, {"fits", fits}});
        timing.push_back(json{{"replicate", rep.replicate}, {"seconds", times}});
    }

    json aggs = json::array();
    for (const auto& a : report.aggregates)
        aggs.push_back(json{{"variant", variantName(a.kind)},
                            {"succeeded", a.succeeded},
                            {"failed", a.failed},
                            {"mse_beta", aggregateToJson(a.mseBeta)},
                            {"mse_alpha", aggregateToJson(a.mseAlpha)},
                            {"coverage_beta", aggregateToJson(a.coverageBeta)},
                            {"length_beta", aggregateToJson(a.lengthBeta)},
                            {"coverage_alpha", aggregateToJson(a.coverageAlpha)},
                            {"length_alpha", aggregateToJson(a.lengthAlpha)},
                            {"true_positive_rate", aggregateToJson(a.truePositive)},
                            {"false_positive_rate", aggregateToJson(a.falsePositive)}});

    writeJson(dir / "report.json", json{{"format", "sjm-report"},
                                        {"version", kFormatVersion},
                                        {"scenario", scenarioToJson(report.scenario)},
                                        {"variants", variants},
                                        {"replicates", reps},
                                        {"aggregates", aggs}});
    writeJson(dir / "timing.json", json{{"replicates", timing}});
}

// ---- configuration -------------------------------------------------------

RunConfig parseRunConfig(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(origin + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw InvalidInput(origin + ": expected a JSON object");
    if (!j.contains("version")) throw InvalidInput(origin + ": missing 'version'");

    return guarded(origin, [&] {
        if (j.at("version").get<int>() != kFormatVersion)
            throw InvalidInput(origin + ": unsupported config version (expected " +
                               std::to_string(kFormatVersion) + ")");
        RunConfig cfg;
        if (j.contains("R")) cfg.hyper = Hyperparameters::defaults(j.at("R").get<int>());
        for (const auto& [key, v] : j.items()) {
            if (key == "version") continue;
            if (v.is_object()) throw InvalidInput(origin + ": '" + key + "' must not be nested");
            if (applyHyperKey(cfg.hyper, key, v)) continue;
            if (key == "variant") cfg.variant = v.get<std::string>();
            else if (key == "replicates") cfg.replicates = v.get<int>();
            else if (key == "threads") cfg.threads = v.get<int>();
            else if (key == "level") cfg.level = v.get<double>();
            else if (key == "bins") cfg.bins = v.get<int>();
            else throw InvalidInput(origin + ": unknown key '" + key + "'");
            if (key == "variant") parseVariant(*cfg.variant);
        }
        if (j.contains("seed")) cfg.seed = cfg.hyper.seed;
        validateHyperparameters(cfg.hyper);
        return cfg;
    });
}

RunConfig readRunConfig(const fs::path& file) { return parseRunConfig(readText(file), file.string()); }

}  // namespace sjm::io
