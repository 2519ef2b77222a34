#include "gsbm/cli.hpp"
#include "gsbm/errors.hpp"
#include "gsbm/io.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <sstream>

#include <unistd.h>

using namespace gsbm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("gsbm_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "gsbm");
    std::ostringstream out, err;
    const int code = cli_dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

FitResult seeded_fit(int n, std::uint64_t seed) {
    oracle::TestRng rng(seed);
    SolverConfig c;
    c.lambda1 = 0.8;
    c.lambda2 = 1.2;
    return fit(SymMatrix(rng.binary(n, 0.4)), SymMatrix(rng.binary(n, 0.9)), c);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("edge list basics") {
    std::vector<std::string> warnings;
    ObservedGraph g = parse_edge_list("a b\nb c", &warnings);
    CHECK(g.n() == 3);
    CHECK(g.observed_edges() == 2.0);
    CHECK(g.node_names == std::vector<std::string>{"a", "b", "c"});
    CHECK(warnings.empty());

    g = parse_edge_list("a a", &warnings);
    CHECK(g.n() == 1);
    CHECK(g.observed_edges() == 0.0);
    CHECK(warnings.size() == 1);

    g = parse_edge_list("a b\nb a\n# x");
    CHECK(g.observed_edges() == 1.0);
    CHECK(g.mask == full_mask(2));
}

TEST_CASE("edge list comments, blank lines and errors") {
    const ObservedGraph g = parse_edge_list("# header\n\n  x\ty  # trailing\r\ny z\n");
    CHECK(g.n() == 3);
    try {
        parse_edge_list("a b\nc d e\n");
        FAIL("expected a ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_edge_list("lonely\n"), ParseError);
}

TEST_CASE("edge list with preset labels keeps indices and isolated nodes") {
    const ObservedGraph g = parse_edge_list("3 1\n", nullptr, {"0", "1", "2", "3"});
    CHECK(g.n() == 4);
    CHECK(g.adjacency(1, 3) == 1.0);
    CHECK(g.node_names[2] == "2");
}

TEST_CASE("edge list parsing is idempotent") {
    oracle::TestRng rng(50);
    const SymMatrix a(rng.binary(15, 0.3));
    std::vector<std::string> names;
    for (int i = 0; i < 15; ++i) names.push_back("n" + std::to_string(i));
    const std::string text = format_edge_list(a, names);
    const ObservedGraph g = parse_edge_list(text, nullptr, names);
    CHECK(g.adjacency == a);
    CHECK(format_edge_list(g.adjacency, g.node_names) == text);
}

TEST_CASE("mask parsing") {
    CHECK(parse_mask("", 3, MaskMode::missing) == full_mask(3));
    const SymMatrix obs = parse_mask("0 1", 3, MaskMode::observed);
    CHECK(obs(0, 1) == 1.0);
    CHECK(obs(1, 0) == 1.0);
    CHECK(obs.dense().sum() == 2.0);
    const SymMatrix miss = parse_mask("0 1", 3, MaskMode::missing);
    CHECK(miss(0, 1) == 0.0);
    CHECK(miss.dense().sum() == 4.0);
    CHECK_THROWS_AS(parse_mask("0 3", 3, MaskMode::observed), ParseError);
    CHECK_THROWS_AS(parse_mask("0 x", 3, MaskMode::observed), ParseError);
    CHECK_THROWS_AS(parse_mask_mode("hidden"), ConfigError);

    oracle::TestRng rng(51);
    const SymMatrix m(rng.binary(12, 0.7));
    CHECK(parse_mask(format_missing_pairs(m), 12, MaskMode::missing) == m);
}

TEST_CASE("labels file") {
    const std::vector<int> l = parse_labels("a 1\nc 0\nb -1\nzz 1\n", {"a", "b", "c", "d"});
    CHECK(l == std::vector<int>{1, -1, 0, -1});
    CHECK_THROWS_AS(parse_labels("a\n", {"a"}), ParseError);
}

TEST_CASE("fit round trip of a zero fit is byte identical") {
    const FitResult f = fit(SymMatrix(4), full_mask(4), SolverConfig{});
    const std::string once = serialize_fit(f, {});
    const StoredFit back = deserialize_fit(once);
    CHECK(serialize_fit(back.fit, back.node_names) == once);
    CHECK(once.rfind("gsbm-fit v1 n=4\n", 0) == 0);
}

TEST_CASE("fit round trip of a seeded fit restores every bit") {
    const FitResult f = seeded_fit(20, 52);
    std::vector<std::string> names;
    for (int i = 0; i < 20; ++i) names.push_back("v" + std::to_string(i));
    TempDir dir;
    save_fit(dir / "f.fit", f, names);
    const StoredFit back = load_fit(dir / "f.fit");
    CHECK((back.fit.L_hat.dense() - f.L_hat.dense()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.fit.S_hat - f.S_hat).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.fit.objective_trace == f.objective_trace);
    CHECK(back.fit.iterations == f.iterations);
    CHECK(back.fit.converged == f.converged);
    CHECK(back.fit.R == f.R);
    CHECK(back.fit.config.lambda1 == f.config.lambda1);
    CHECK(back.fit.config.svd_tol == f.config.svd_tol);
    CHECK(back.node_names == names);
}

TEST_CASE("fit files with another version or truncated content are rejected") {
    const std::string text = serialize_fit(seeded_fit(6, 53), {});
    std::string v2 = text;
    v2.replace(0, std::string("gsbm-fit v1").size(), "gsbm-fit v2");
    CHECK_THROWS_AS(deserialize_fit(v2), VersionError);
    CHECK_THROWS_AS(deserialize_fit(text.substr(0, text.size() / 2)), ParseError);
    CHECK_THROWS_AS(deserialize_fit(text + "junk\n"), ParseError);
    CHECK_THROWS_AS(deserialize_fit(""), ParseError);
}

TEST_CASE("truth json") {
    SbmConfig sbm;
    sbm.n_inliers = 9;
    sbm.seed = 3;
    const GroundTruth t = build_ground_truth(sbm, OutlierConfig{OutlierKind::hub, 2, 0.5, 0.6});
    const auto j = nlohmann::json::parse(truth_to_json(t));
    CHECK(j["n"] == 11);
    CHECK(j["outliers"].size() == 2);
    CHECK(j["communities"].size() == 11);
    CHECK(j["outlier_kind"] == "hub");
}

TEST_CASE("atomic writes leave no temporary file") {
    TempDir dir;
    write_file_atomic(dir / "x.txt", "hello");
    CHECK(read_file(dir / "x.txt") == "hello");
    write_file_atomic(dir / "x.txt", "again");
    CHECK(read_file(dir / "x.txt") == "again");
    CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));
    CHECK_THROWS_AS(read_file(dir / "absent"), InputError);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("lambda flag values") {
    CHECK(parse_lambda_spec("auto").kind == LambdaSpec::Kind::automatic);
    const LambdaSpec v = parse_lambda_spec("2.5");
    CHECK(v.kind == LambdaSpec::Kind::value);
    CHECK(v.x == 2.5);
    const LambdaSpec m = parse_lambda_spec("c10");
    CHECK(m.kind == LambdaSpec::Kind::multiplier);
    CHECK(m.x == 10.0);
    CHECK_THROWS_AS(parse_lambda_spec("c"), ConfigError);
    CHECK_THROWS_AS(parse_lambda_spec("-1"), ConfigError);
    CHECK_THROWS_AS(parse_lambda_spec("big"), ConfigError);
}

TEST_CASE("generate, fit, detect, predict and communities end to end") {
    TempDir dir;
    Run r = cli({"generate", "--n", "200", "--k", "3", "--p-in", "0.5", "--p-out", "0.2", "--outliers", "hub",
                 "--s", "5", "--pi-hub", "0.5", "--seed", "42", "--out", dir / "g.edges", "--truth",
                 dir / "t.json"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "g.edges"));
    CHECK(fs::exists(dir / "t.json"));
    CHECK(r.err.find("seed=42") != std::string::npos);

    r = cli({"fit", "--graph", dir / "g.edges", "--lambda1", "auto", "--lambda2", "auto", "--out", dir / "f.fit"});
    REQUIRE(r.code == 0);
    CHECK(load_fit(dir / "f.fit").fit.n() == 205);
    CHECK(r.err.find("lambda1=") != std::string::npos);
    CHECK(r.err.find("iterations=") != std::string::npos);
    CHECK(r.err.find("objective=") != std::string::npos);

    r = cli({"fit", "--graph", dir / "g.edges", "--num-nodes", "205", "--lambda1", "c6.5", "--lambda2", "c2.2",
             "--out", dir / "f2.fit"});
    REQUIRE(r.code == 0);
    r = cli({"detect", "--fit", dir / "f2.fit", "--graph", dir / "g.edges", "--num-nodes", "205"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("node,col_norm,cert_lhs,detected\n", 0) == 0);
    const auto truth = nlohmann::json::parse(read_file(dir / "t.json"));
    int hits = 0, detected = 0;
    std::istringstream rows(r.out);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        if (line.back() != '1') continue;
        ++detected;
        const int node = std::stoi(line.substr(0, line.find(',')));
        for (int o : truth["outliers"]) hits += o == node;
    }
    CHECK(hits >= 4);
    CHECK(detected <= hits + 1);

    write_file_atomic(dir / "pairs.txt", "0 1\n7 9\n");
    r = cli({"predict", "--fit", dir / "f2.fit", "--pairs", dir / "pairs.txt", "--out", dir / "p.csv"});
    REQUIRE(r.code == 0);
    const std::string pred = read_file(dir / "p.csv");
    CHECK(pred.rfind("i,j,score\n0,1,", 0) == 0);
    CHECK(std::count(pred.begin(), pred.end(), '\n') == 3);

    std::string labels;
    for (std::size_t i = 0; i < truth["communities"].size(); ++i)
        labels += std::to_string(i) + " " + std::to_string(int(truth["communities"][i])) + "\n";
    write_file_atomic(dir / "labels.txt", labels);
    r = cli({"communities", "--fit", dir / "f2.fit", "--labels", dir / "labels.txt"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("node,community\n", 0) == 0);
    CHECK(r.err.find("misclassified=") != std::string::npos);
}

TEST_CASE("generation is reproducible from the seed") {
    TempDir dir;
    const std::vector<std::string> base{"generate", "--n", "40", "--outliers", "mixed", "--s", "3", "--p-observe",
                                        "0.8", "--seed", "9"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", dir / "a.edges", "--mask-out", dir / "a.mask"});
    b.insert(b.end(), {"--out", dir / "b.edges", "--mask-out", dir / "b.mask"});
    REQUIRE(cli(a).code == 0);
    REQUIRE(cli(b).code == 0);
    CHECK(read_file(dir / "a.edges") == read_file(dir / "b.edges"));
    CHECK(read_file(dir / "a.mask") == read_file(dir / "b.mask"));
    CHECK_FALSE(read_file(dir / "a.mask").empty());
}

TEST_CASE("fit with a missing-pairs mask feeds predict") {
    TempDir dir;
    REQUIRE(cli({"generate", "--n", "60", "--s", "2", "--pi-hub", "0.2", "--p-observe", "0.8", "--seed", "5",
                 "--out", dir / "g.edges", "--mask-out", dir / "m.txt"})
                .code == 0);
    REQUIRE(cli({"fit", "--graph", dir / "g.edges", "--num-nodes", "62", "--mask", dir / "m.txt", "--lambda1",
                 "c1.5", "--lambda2", "c2.2", "--out", dir / "f.fit"})
                .code == 0);
    const Run r = cli({"predict", "--fit", dir / "f.fit", "--mask", dir / "m.txt"});
    REQUIRE(r.code == 0);
    const std::string mask = read_file(dir / "m.txt");
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == std::count(mask.begin(), mask.end(), '\n') + 1);
}

TEST_CASE("bench writes both CSV files") {
    TempDir dir;
    const Run r = cli({"bench", "--scenario", "hub", "--n", "40", "--s", "1,2", "--pi", "0.5", "--reps", "2",
                       "--seed", "3", "--summary", dir / "s.csv", "--reps-out", dir / "r.csv"});
    REQUIRE(r.code == 0);
    const std::string s = read_file(dir / "s.csv"), reps = read_file(dir / "r.csv");
    CHECK(std::count(s.begin(), s.end(), '\n') == 3);
    CHECK(std::count(reps.begin(), reps.end(), '\n') == 5);
}

TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"generate", "--n", "10"}).code == kExitUsage);  // --seed and --out missing
    CHECK(cli({"fit", "--graph", dir / "missing.edges"}).code == kExitData);
    write_file_atomic(dir / "bad.edges", "a b c\n");
    const Run bad = cli({"fit", "--graph", dir / "bad.edges"});
    CHECK(bad.code == kExitData);
    CHECK(bad.err.find("line 1") != std::string::npos);
    write_file_atomic(dir / "g.edges", "a b\nb c\n");
    CHECK(cli({"fit", "--graph", dir / "g.edges", "--lambda1", "lots"}).code == kExitUsage);
    CHECK(cli({"fit", "--graph", dir / "g.edges", "--lambda1", "0"}).code == kExitData);
    CHECK(cli({"fit", "--graph", dir / "g.edges", "--lambda1", "0.01", "--lambda2", "5", "--svd-tol", "1e-16",
               "--max-iters", "50"})
              .code != kExitUsage);
    write_file_atomic(dir / "v2.fit", "gsbm-fit v2 n=1\n");
    CHECK(cli({"detect", "--fit", dir / "v2.fit"}).code == kExitData);
}

TEST_CASE("a numerical failure exits with 3") {
    TempDir dir;
    REQUIRE(cli({"generate", "--n", "60", "--s", "2", "--seed", "5", "--out", dir / "g.edges"}).code == 0);
    // Asking for a singular-pair accuracy below machine precision cannot converge.
    const Run r = cli({"fit", "--graph", dir / "g.edges", "--lambda1", "c0.5", "--lambda2", "c2.2", "--svd-tol",
                       "1e-30"});
    CHECK(r.code == kExitNumerical);
}

}  // TEST_SUITE
