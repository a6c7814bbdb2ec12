#include <gtest/gtest.h>

#include <filesystem>

#include "cli.hpp"

using namespace semifield;
using cli::json;

namespace {

struct Run {
    int code;
    std::string out, err;
    json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::vector<const char*> argv{"semifield"};
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<json> lines(const std::string& text) {
    std::vector<json> v;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
        if (!line.empty()) v.push_back(json::parse(line));
    return v;
}

}  // namespace

TEST(Cli, ElementNotation) {
    auto L = build_field(3, 4);
    EXPECT_EQ(cli::parse_element(*L, "[2,1]"), L->from_coeffs(std::vector<u32>{2, 1}));
    EXPECT_EQ(cli::parse_element(*L, "[ -1 , 0, 1 ]"), L->from_coeffs(std::vector<u32>{2, 0, 1}));
    EXPECT_EQ(cli::parse_element(*L, "g^16"), L->pow(L->generator(), 16));
    EXPECT_EQ(cli::parse_element(*L, "g^-1"), L->inv(L->generator()));
    EXPECT_EQ(cli::parse_element(*L, "-1"), L->neg(L->one()));
    EXPECT_EQ(L->order_of(cli::of_order(*L, 16)), 16u);
    EXPECT_THROW(cli::parse_element(*L, "[1,2,3,4,5]"), cli::UsageError);
    EXPECT_THROW(cli::parse_element(*L, "g^x"), cli::UsageError);
    EXPECT_THROW(cli::parse_element(*L, "two"), cli::UsageError);
    EXPECT_THROW(cli::of_order(*L, 7), cli::UsageError);
}

TEST(Cli, NucleiOfCommutativeC) {
    auto r = run({"nuclei", "--family", "C", "--p", "3", "--m", "3", "--s", "2", "--l", "1", "--R", "-1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.report()["results"];
    EXPECT_EQ(j["linear"]["left"]["dim"], 1);
    EXPECT_EQ(j["linear"]["right"]["dim"], 1);
    EXPECT_EQ(j["linear"]["middle"]["dim"], 2);
    EXPECT_EQ(j["linear"]["middle"]["order"], 9);
    EXPECT_EQ(j["bruteforce"], j["linear"]);
    for (const char* k : {"left", "middle", "right", "center"}) EXPECT_EQ(j["agreement"][k], "match");
    EXPECT_EQ(j["prediction"]["agreement"], "match");
}

TEST(Cli, GanleyNonCommutativeExample) {
    auto r = run({"ganley", "--family", "C", "--p", "3", "--m", "4", "--l-order", "16", "--R-order", "16"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.report()["results"];
    EXPECT_EQ(j["commutative"], false);
    EXPECT_TRUE(j["semifield_witness"].is_null());
    EXPECT_EQ(j["criterion"]["holds"], false);
    EXPECT_EQ(j["agreement"], "match");

    auto c = run({"ganley", "--family", "C", "--p", "3", "--m", "3", "--s", "2", "--l", "1", "--R", "-1"});
    ASSERT_EQ(c.code, 0);
    EXPECT_EQ(c.report()["results"]["commutative"], true);
    EXPECT_EQ(c.report()["results"]["witness_space"]["dim"].get<unsigned>() > 0, true);
}

TEST(Cli, CensusMatchesDirectCertification) {
    // ground truth: rank-certify every raw X product at p=3, m=2, s=1
    auto L = build_field(3, 2);
    VectorSpace sp(3, 4);
    u64 valid = 0;
    for (u32 v = 0; v < 9; ++v)
        for (u32 l = 1; l < 9; ++l)
            for (u32 n = 1; n < 9; ++n)
                for (u32 N = 1; N < 9; ++N)
                    valid += verify_presemifield(sp, XProduct(L, XParams{1, Element{v}, Element{l}, Element{n}, Element{N}})).ok;

    auto r = run({"census", "--p", "3", "--m", "2", "--s", "1", "--family", "X", "--threads", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto all = lines(r.out);
    ASSERT_FALSE(all.empty());
    const json summary = all.back();
    EXPECT_EQ(summary["tuples"], 9 * 8 * 8 * 8);
    EXPECT_EQ(summary["valid"], valid);
    EXPECT_EQ(all.size() - 1, valid);  // one line per valid instance
    EXPECT_EQ(summary["prediction_mismatches"], 0);

    auto red = run({"census", "--p", "3", "--m", "2", "--s", "1", "--family", "X", "--reduce", "--summary-only"});
    ASSERT_EQ(red.code, 0) << red.err;
    const json rs = lines(red.out).back();
    EXPECT_EQ(rs["valid"], valid);
    EXPECT_EQ(rs["invariance_violations"], 0);
    EXPECT_LT(rs["orbits"].get<u64>(), valid);
    // class totals agree between full and orbit-reduced counts
    ASSERT_EQ(rs["histogram"].size(), summary["histogram"].size());
    for (std::size_t i = 0; i < rs["histogram"].size(); ++i) {
        EXPECT_EQ(rs["histogram"][i]["nuclei"], summary["histogram"][i]["nuclei"]);
        EXPECT_EQ(rs["histogram"][i]["tuples"], summary["histogram"][i]["tuples"]);
    }
}

TEST(Cli, CensusOfCAndB) {
    for (const char* fam : {"C", "B"}) {
        auto r = run({"census", "--p", "3", "--m", "2", "--family", fam, "--summary-only"});
        ASSERT_EQ(r.code, 0) << r.err;
        const json s = lines(r.out).back();
        u64 sum = 0;
        for (auto& h : s["histogram"]) sum += h["tuples"].get<u64>();
        EXPECT_EQ(sum, s["valid"].get<u64>());
        EXPECT_EQ(s["valid"].get<u64>() + s["invalid"].get<u64>(), s["tuples"].get<u64>());
    }
    EXPECT_EQ(run({"census", "--p", "3", "--m", "2", "--family", "A"}).code, 2);
}

TEST(Cli, VerifyAgreesWithPredicate) {
    auto bad = run({"verify", "--family", "X", "--p", "3", "--m", "2", "--v", "1", "--l", "1", "--n", "1", "--N", "1"});
    ASSERT_EQ(bad.code, 0) << bad.err;
    auto jb = bad.report()["results"];
    EXPECT_EQ(jb["predicate"]["valid"], false);
    EXPECT_EQ(jb["certificate"]["ok"], false);
    EXPECT_EQ(jb["agreement"], "match");
    auto tw = run({"verify", "--family", "twisted", "--p", "3", "--m", "3", "--l", "1"});
    ASSERT_EQ(tw.code, 0) << tw.err;
    EXPECT_EQ(tw.report()["results"]["scan"]["ok"], true);
    auto dk = run({"verify", "--family", "dickson", "--p", "3", "--m", "2", "--s", "1"});
    ASSERT_EQ(dk.code, 0) << dk.err;
}

TEST(Cli, PredictReportsAgreement) {
    auto r = run({"predict", "--family", "C", "--p", "3", "--m", "2", "--l", "g^1", "--R", "g^1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.report()["results"];
    EXPECT_EQ(j["agreement"]["overall"], "match");
    EXPECT_EQ(j["measured"]["middle"], 2);
    auto d = run({"predict", "--family", "dickson", "--p", "3", "--m", "2", "--s", "1"});
    ASSERT_EQ(d.code, 0);
    EXPECT_EQ(d.report()["results"]["agreement"]["overall"], "not-applicable");
}

TEST(Cli, ExportTables) {
    auto csv = run({"export", "--family", "twisted", "--p", "3", "--m", "2", "--s", "1", "--l", "g^1", "--format", "csv"});
    ASSERT_EQ(csv.code, 0) << csv.err;
    auto L = build_field(3, 2);
    auto P = make_twisted(L, 1, L->generator());
    std::istringstream is(csv.out);
    std::string line;
    for (u32 x = 0; x < 9; ++x) {
        ASSERT_TRUE(std::getline(is, line));
        std::istringstream row(line);
        std::string cell;
        for (u32 y = 0; y < 9; ++y) {
            ASSERT_TRUE(std::getline(row, cell, ','));
            EXPECT_EQ(std::stoul(cell), P.mul(x, y));
        }
    }
    auto js = run({"export", "--family", "twisted", "--p", "3", "--m", "2", "--s", "1", "--l", "g^1"});
    ASSERT_EQ(js.code, 0);
    auto t = js.report()["table"];
    ASSERT_EQ(t.size(), 9u);
    EXPECT_EQ(t[4][7], P.mul(4, 7));

    const auto path = std::filesystem::temp_directory_path() / "semifield_cli_export.json";
    auto f = run({"export", "--family", "field", "--p", "3", "--m", "2", "--e", "2", "--out", path.string()});
    ASSERT_EQ(f.code, 0) << f.err;
    EXPECT_EQ(f.report()["results"]["written"], path.string());
    std::ifstream in(path);
    auto written = json::parse(in);
    auto S = to_semifield(field_presemifield(L), 2);
    EXPECT_EQ(written["table"][2][2], S.circ(2, 2));
    EXPECT_EQ(written["table"][2][5], 5u);  // e = 2 is the identity
    std::filesystem::remove(path);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"nuclei", "--p", "3"}).code, 2);
    EXPECT_EQ(run({"nuclei", "--p", "3", "--m", "2", "--family", "Q"}).code, 2);
    EXPECT_EQ(run({"nuclei", "--p", "4", "--m", "2"}).code, 2);
    EXPECT_EQ(run({"construct", "--p", "3", "--m", "2", "--family", "C", "--l", "1"}).code, 2);
    EXPECT_EQ(run({"construct", "--p", "3", "--m", "2", "--family", "C", "--l", "[1,0,0]", "--R", "1"}).code, 2);
    auto bad = run({"construct", "--p", "3", "--m", "2", "--family", "B", "--l", "1", "--n", "1", "--N", "1"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("error"), std::string::npos);
    EXPECT_EQ(run({"nuclei", "--p", "3", "--m", "2", "--e", "0"}).code, 2);
    EXPECT_EQ(run({"construct", "--bogus"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ReportsAreDeterministic) {
    const std::vector<std::string> args{"nuclei", "--family", "twisted", "--p", "3", "--m", "4", "--s", "1", "--l", "g^3"};
    auto a = run(args).report(), b = run(args).report();
    a.erase("timing_ms");
    b.erase("timing_ms");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a["command"], "nuclei --family twisted --p 3 --m 4 --s 1 --l g^3");
}

TEST(Cli, CharTwoA) {
    auto r = run({"construct", "--family", "A", "--p", "2", "--m", "2", "--s", "2", "--modulus-F", "[1,1,0,0,1]", "--l-order",
                  "3", "--mu", "[0,0,0,1]"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.report()["instance"]["order"], 16);
    auto g = run({"ganley", "--family", "A", "--p", "2", "--m", "2", "--s", "2", "--modulus-F", "[1,1,0,0,1]", "--l-order",
                  "3", "--mu", "[0,0,0,1]"});
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_EQ(g.report()["results"]["algebra"]["commutative"], true);
    EXPECT_EQ(g.report()["results"]["algebra"]["associative"], true);
}
