#include "gsbm/io.hpp"

#include "gsbm/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gsbm {

namespace {

constexpr std::string_view kFitMagic = "gsbm-fit";
constexpr std::string_view kFitVersion = "v1";

std::vector<std::string_view> tokenize(std::string_view line) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

/// Calls fn(line, line_number) for every line.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t number = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view line = text.substr(0, nl);
        fn(line, ++number);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
}

long long parse_int(std::string_view s, std::size_t line) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
    return v;
}

double parse_real(std::string_view s, std::size_t line) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("expected a number, got '" + std::string(s) + "'", line);
    return v;
}

}  // namespace

ObservedGraph parse_edge_list(std::string_view text, std::vector<std::string>* warnings,
                              const std::vector<std::string>& preset_labels) {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> index;
    auto intern = [&](std::string_view label) {
        auto [it, inserted] = index.emplace(std::string(label), static_cast<int>(names.size()));
        if (inserted) names.emplace_back(label);
        return it->second;
    };
    for (const std::string& label : preset_labels) intern(label);

    std::vector<std::pair<int, int>> edges;
    for_each_line(text, [&](std::string_view line, std::size_t number) {
        const auto tokens = tokenize(line);
        if (tokens.empty()) return;
        if (tokens.size() != 2)
            throw ParseError("expected 2 node labels, found " + std::to_string(tokens.size()), number);
        const int u = intern(tokens[0]);
        const int v = intern(tokens[1]);
        if (u == v) {
            if (warnings) warnings->push_back("line " + std::to_string(number) + ": self-loop on '" + names[u] + "' dropped");
            return;
        }
        edges.emplace_back(u, v);
    });

    const auto n = static_cast<Eigen::Index>(names.size());
    DenseMatrix a = DenseMatrix::Zero(n, n);
    for (auto [u, v] : edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    ObservedGraph g{SymMatrix(std::move(a)), full_mask(n), std::move(names)};
    return g;
}

MaskMode parse_mask_mode(const std::string& s) {
    if (s == "observed") return MaskMode::observed;
    if (s == "missing") return MaskMode::missing;
    throw ConfigError("unknown mask mode '" + s + "' (expected observed or missing)");
}

SymMatrix parse_mask(std::string_view text, Eigen::Index n, MaskMode mode) {
    DenseMatrix listed = DenseMatrix::Zero(n, n);
    for_each_line(text, [&](std::string_view line, std::size_t number) {
        const auto tokens = tokenize(line);
        if (tokens.empty()) return;
        if (tokens.size() != 2)
            throw ParseError("expected 2 node indices, found " + std::to_string(tokens.size()), number);
        const long long i = parse_int(tokens[0], number);
        const long long j = parse_int(tokens[1], number);
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw ParseError("index out of range [0, " + std::to_string(n) + ")", number);
        if (i == j) return;
        listed(i, j) = 1.0;
        listed(j, i) = 1.0;
    });
    if (mode == MaskMode::observed) return SymMatrix(std::move(listed));
    DenseMatrix mask = DenseMatrix::Ones(n, n) - listed;
    mask.diagonal().setZero();
    return SymMatrix(std::move(mask));
}

std::string format_edge_list(const SymMatrix& a, const std::vector<std::string>& names) {
    auto label = [&](Eigen::Index i) { return names.empty() ? std::to_string(i) : names[i]; };
    std::string out;
    for (Eigen::Index i = 0; i < a.n(); ++i)
        for (Eigen::Index j = i + 1; j < a.n(); ++j)
            if (a(i, j) != 0.0) out += label(i) + ' ' + label(j) + '\n';
    return out;
}

std::string format_missing_pairs(const SymMatrix& mask) {
    std::string out;
    for (Eigen::Index i = 0; i < mask.n(); ++i)
        for (Eigen::Index j = i + 1; j < mask.n(); ++j)
            if (mask(i, j) == 0.0) out += std::to_string(i) + ' ' + std::to_string(j) + '\n';
    return out;
}

std::vector<int> parse_labels(std::string_view text, const std::vector<std::string>& node_names) {
    std::unordered_map<std::string_view, int> index;
    for (std::size_t i = 0; i < node_names.size(); ++i) index.emplace(node_names[i], static_cast<int>(i));
    std::vector<int> out(node_names.size(), -1);
    for_each_line(text, [&](std::string_view line, std::size_t number) {
        const auto tokens = tokenize(line);
        if (tokens.empty()) return;
        if (tokens.size() != 2)
            throw ParseError("expected 'node community', found " + std::to_string(tokens.size()) + " tokens", number);
        const long long c = parse_int(tokens[1], number);
        if (auto it = index.find(tokens[0]); it != index.end()) out[it->second] = c < 0 ? -1 : static_cast<int>(c);
    });
    return out;
}

std::string serialize_fit(const FitResult& fit, const std::vector<std::string>& node_names) {
    const Eigen::Index n = fit.n();
    if (!node_names.empty() && static_cast<Eigen::Index>(node_names.size()) != n)
        throw ShapeError("serialize_fit: node_names length differs from n");
    const SolverConfig& c = fit.config;
    std::ostringstream out;
    out << kFitMagic << ' ' << kFitVersion << " n=" << n << '\n';
    out << "[config]\n"
        << "lambda1," << format_double(c.lambda1) << '\n'
        << "lambda2," << format_double(c.lambda2) << '\n'
        << "epsilon," << format_double(c.epsilon) << '\n'
        << "eta," << format_double(c.eta) << '\n'
        << "max_iters," << c.max_iters << '\n'
        << "rel_tol," << format_double(c.rel_tol) << '\n'
        << "svd_tol," << format_double(c.svd_tol) << '\n'
        << "svd_max_iter," << c.svd_max_iter << '\n'
        << "iterations," << fit.iterations << '\n'
        << "converged," << (fit.converged ? 1 : 0) << '\n'
        << "R," << format_double(fit.R) << '\n';
    out << "[nodes]\n";
    for (Eigen::Index i = 0; i < n; ++i) out << (node_names.empty() ? std::to_string(i) : node_names[i]) << '\n';
    out << "[trace]\n";
    for (double v : fit.objective_trace) out << format_double(v) << '\n';
    auto matrix = [&](const char* name, const DenseMatrix& m) {
        out << '[' << name << "]\n";
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j) out << ',';
                out << format_double(m(i, j));
            }
            out << '\n';
        }
    };
    matrix("L_hat", fit.L_hat.dense());
    matrix("S_hat", fit.S_hat);
    out << "[end]\n";
    return out.str();
}

StoredFit deserialize_fit(std::string_view text) {
    std::vector<std::string_view> lines;
    for_each_line(text, [&](std::string_view line, std::size_t) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
    });
    if (!lines.empty() && lines.back().empty()) lines.pop_back();

    if (lines.empty()) throw ParseError("empty fit file", 1);
    const auto header = tokenize(lines[0]);
    if (header.size() != 3 || header[0] != kFitMagic || header[2].substr(0, 2) != "n=")
        throw ParseError("not a gsbm fit file", 1);
    if (header[1] != kFitVersion)
        throw VersionError("unsupported fit format version '" + std::string(header[1]) + "'", 1);
    const long long n = parse_int(header[2].substr(2), 1);
    if (n < 0) throw ParseError("negative node count", 1);

    std::size_t pos = 1;
    auto expect_section = [&](std::string_view name) {
        if (pos >= lines.size()) throw ParseError("truncated file: missing [" + std::string(name) + "]", pos + 1);
        if (lines[pos] != "[" + std::string(name) + "]")
            throw ParseError("expected [" + std::string(name) + "]", pos + 1);
        ++pos;
    };
    auto at_section = [&] { return pos < lines.size() && !lines[pos].empty() && lines[pos].front() == '['; };

    StoredFit out;
    FitResult& f = out.fit;
    expect_section("config");
    std::unordered_map<std::string, std::pair<std::string_view, std::size_t>> kv;
    while (pos < lines.size() && !at_section()) {
        const auto comma = lines[pos].find(',');
        if (comma == std::string_view::npos) throw ParseError("expected key,value", pos + 1);
        kv[std::string(lines[pos].substr(0, comma))] = {lines[pos].substr(comma + 1), pos + 1};
        ++pos;
    }
    auto get = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(std::string("missing config key '") + key + "'");
        return it->second;
    };
    auto real = [&](const char* key) { auto [v, l] = get(key); return parse_real(v, l); };
    auto integer = [&](const char* key) { auto [v, l] = get(key); return static_cast<int>(parse_int(v, l)); };
    f.config.lambda1 = real("lambda1");
    f.config.lambda2 = real("lambda2");
    f.config.epsilon = real("epsilon");
    f.config.eta = real("eta");
    f.config.max_iters = integer("max_iters");
    f.config.rel_tol = real("rel_tol");
    f.config.svd_tol = real("svd_tol");
    f.config.svd_max_iter = integer("svd_max_iter");
    f.iterations = integer("iterations");
    f.converged = integer("converged") != 0;
    f.R = real("R");

    expect_section("nodes");
    for (long long i = 0; i < n; ++i, ++pos) {
        if (pos >= lines.size() || at_section()) throw ParseError("truncated file: too few node labels", pos + 1);
        out.node_names.emplace_back(lines[pos]);
    }

    expect_section("trace");
    while (pos < lines.size() && !at_section()) {
        f.objective_trace.push_back(parse_real(lines[pos], pos + 1));
        ++pos;
    }

    auto read_matrix = [&](const char* name) {
        expect_section(name);
        DenseMatrix m(n, n);
        for (long long i = 0; i < n; ++i, ++pos) {
            if (pos >= lines.size() || at_section())
                throw ParseError(std::string("truncated file: [") + name + "] has too few rows", pos + 1);
            std::string_view row = lines[pos];
            for (long long j = 0; j < n; ++j) {
                const auto comma = row.find(',');
                if ((comma == std::string_view::npos) != (j == n - 1))
                    throw ParseError(std::string("[") + name + "] row must have " + std::to_string(n) + " entries", pos + 1);
                m(i, j) = parse_real(row.substr(0, comma), pos + 1);
                if (comma != std::string_view::npos) row.remove_prefix(comma + 1);
            }
        }
        return m;
    };
    f.L_hat = SymMatrix(read_matrix("L_hat"));
    f.S_hat = read_matrix("S_hat");
    expect_section("end");
    if (pos != lines.size()) throw ParseError("content after [end]", pos + 1);
    return out;
}

void save_fit(const std::filesystem::path& path, const FitResult& fit,
              const std::vector<std::string>& node_names) {
    write_file_atomic(path, serialize_fit(fit, node_names));
}

StoredFit load_fit(const std::filesystem::path& path) { return deserialize_fit(read_file(path)); }

std::string truth_to_json(const GroundTruth& truth) {
    nlohmann::ordered_json j;
    j["n"] = truth.n();
    j["n_inliers"] = truth.sbm.n_inliers;
    j["k_communities"] = truth.sbm.k_communities;
    j["p_in"] = truth.sbm.p_in;
    j["p_out"] = truth.sbm.p_out;
    j["seed"] = truth.sbm.seed;
    j["outlier_kind"] = to_string(truth.outlier.kind);
    j["s"] = truth.outlier.s;
    j["pi_hub"] = truth.outlier.pi_hub;
    j["pi_mix"] = truth.outlier.pi_mix;
    j["communities"] = truth.communities;
    j["outliers"] = truth.outliers;
    return j.dump(2) + "\n";
}

std::string format_predictions(const Prediction& p, const std::vector<std::string>& names) {
    auto label = [&](int i) { return names.empty() ? std::to_string(i) : names[i]; };
    std::string out = "i,j,score\n";
    for (std::size_t q = 0; q < p.pairs.size(); ++q)
        out += label(p.pairs[q].i) + ',' + label(p.pairs[q].j) + ',' + format_double(p.scores[q]) + '\n';
    return out;
}

std::string format_outlier_report(const OutlierReport& r, const std::vector<std::string>& names) {
    std::unordered_set<int> detected(r.detected.begin(), r.detected.end());
    std::string out = "node,col_norm,cert_lhs,detected\n";
    for (Eigen::Index j = 0; j < r.column_norms.size(); ++j) {
        out += (names.empty() ? std::to_string(j) : names[j]) + ',' + format_double(r.column_norms(j)) + ',' +
               (r.has_certificate ? format_double(r.certificate.lhs(j)) : std::string("nan")) + ',' +
               (detected.count(static_cast<int>(j)) ? "1" : "0") + '\n';
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw InputError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw InputError("cannot rename to '" + path.string() + "': " + ec.message());
    }
}

}  // namespace gsbm
