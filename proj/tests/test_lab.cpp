#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "curvlab/errors.hpp"
#include "curvlab/lab.hpp"

using namespace curvlab;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(CURVLAB_TEST_DATA) + "/" + name; }

FamilyParams fam(int kind, int a, int n = 0, std::vector<cplx> q = {}) { return {kind, a, n, std::move(q), true}; }

int cli(const std::string& args) {
    const std::string cmd = std::string(CURVLAB_CLI) + " " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("curvlab_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("gen_family builds the listed polynomials") {
    HoloClass a = gen_family(make_spec(0, 6), fam(1, 2));
    CHECK(a.a == std::vector<cplx>{0.0, 0.0, 1.0, 0.0, 0.0});
    HoloClass b = gen_family(make_spec(0, 8), fam(2, 1, 4));
    CHECK(b.a == std::vector<cplx>{0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0});
    HoloClass c = gen_family(make_spec(0, 6), fam(3, 1, 2, {2.0}));
    CHECK(c.a == std::vector<cplx>{0.0, -2.0, 0.0, 1.0, 0.0});
}

TEST_CASE("gen_family names the failed hypothesis") {
    CHECK_THROWS_AS(gen_family(make_spec(0, 4), fam(1, 3)), HypothesisViolation);
    CHECK_THROWS_AS(gen_family(make_spec(0, 4), fam(1, 0)), HypothesisViolation);
    CHECK_THROWS_WITH_AS(gen_family(make_spec(0, 7), fam(2, 1, 4)), doctest::Contains("2a + n = k-2"),
                         HypothesisViolation);
    CHECK_THROWS_AS(gen_family(make_spec(0, 8), fam(2, 2, 4)), HypothesisViolation);
    CHECK_THROWS_AS(gen_family(make_spec(0, 6), fam(3, 1, 2, {})), HypothesisViolation);
    CHECK_THROWS_AS(gen_family(make_spec(0, 7), fam(3, 1, 2, {1.0})), HypothesisViolation);
    CHECK_THROWS_AS(gen_family(make_spec(0, 9), fam(3, 1, 3, {1.0, 1.0})), HypothesisViolation);
    CHECK_THROWS_AS(gen_family(make_spec(0, 6), fam(4, 1)), InvalidArgument);
}

TEST_CASE("non-strict families only need to fit") {
    FamilyParams p{2, 1, 4, {}, false};
    HoloClass g = gen_family(make_spec(0, 7), p);
    CHECK(g.a == std::vector<cplx>{0.0, -1.0, 0.0, 0.0, 0.0, 1.0});
    p.a = 2;
    CHECK_THROWS_AS(gen_family(make_spec(0, 7), p), HypothesisViolation);
}

TEST_CASE("config parsing, defaults and hashing") {
    ExperimentConfig c = load_config(data("sweep_k4.json"));
    CHECK(c.experiment == "sweep");
    CHECK(c.spec == BundleSpec{0, 4});
    REQUIRE(c.lambdas.size() == 4);
    CHECK(c.lambdas.front() == 2.0);
    CHECK(c.lambdas.back() == doctest::Approx(4 * kPi));
    CHECK(c.solver.l_max == 24);
    CHECK(c.seed == 3);

    ExperimentConfig again = parse_config(to_json(c));
    CHECK(config_hash(again) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    again.seed = 4;
    CHECK(config_hash(again) != config_hash(c));

    CHECK_THROWS_AS(parse_config(json{{"bundle", {{"deg_L1", 0}, {"deg_L2", 4}}}}), InvalidArgument);
    CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"bundle", {{"deg_L1", "x"}}}}), InvalidArgument);
    CHECK_THROWS_AS(load_config(data("missing.json")), InvalidArgument);

    ExperimentConfig e = parse_config(json{{"schema", 1},
                                           {"bundle", {{"deg_L1", 0}, {"deg_L2", 3}}},
                                           {"b", json::array({json::array({"1/3", "0"}), json::array({"-2", "1/2"})})},
                                           {"lambdas", 5.0}});
    REQUIRE(e.b_exact.size() == 2);
    CHECK(e.b_exact[0] == GaussRational::parse("1/3", "0"));
    CHECK(e.lambdas == std::vector<double>{5.0});
}

TEST_CASE("class_of is seeded") {
    ExperimentConfig c;
    c.spec = make_spec(0, 5);
    c.seed = 7;
    CHECK(class_of(c).a == class_of(c).a);
    ExperimentConfig d = c;
    d.seed = 8;
    CHECK(class_of(c).a != class_of(d).a);
}

TEST_CASE("existence sweep is deterministic and within the bound") {
    ExperimentConfig c = load_config(data("sweep_k4.json"));
    RunRecord a = run_existence_sweep(c);
    RunRecord b = run_existence_sweep(c);
    CHECK(a.passed());
    CHECK(a.summary["stratum_at_H0"] == 2);
    CHECK(a.summary["theoretical_bound"].get<double>() == doctest::Approx(8 * kPi));
    for (const auto& o : a.points) CHECK(o.converged);
    const std::string csv = sweep_csv(a, 4);
    CHECK(csv.rfind("lambda,converged,residual_sup,offset,b_1_re,b_1_im", 0) == 0);
    CHECK(csv == sweep_csv(b, 4));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

    c.out_dir = scratch("sweep").string();
    auto files = write_artifacts(c, a);
    CHECK(std::filesystem::exists(c.out_dir + "/sweep_k4.json"));
    CHECK(std::filesystem::exists(c.out_dir + "/sweep_k4_sweep.csv"));
    std::ifstream in(c.out_dir + "/sweep_k4.json");
    json j = json::parse(in);
    CHECK(j["config_hash"].get<std::string>() == a.config_hash);
    CHECK(j["seed"] == 3);
}

TEST_CASE("sweep reports a failure point without claiming non-existence") {
    ExperimentConfig c;
    c.spec = make_spec(0, 4);
    c.coefficients = {0.0, 0.0, 1.0};
    c.lambdas = {4 * kPi};
    c.solver.l_max = 24;
    RunRecord r = run_existence_sweep(c);
    REQUIRE(r.points.size() == 1);
    CHECK_FALSE(r.points[0].converged);
    CHECK(r.summary["lambda_star"].get<double>() == doctest::Approx(4 * kPi));
    CHECK(r.summary["stratum_at_H0"] == 1);
    CHECK(sweep_csv(r, 4).find(",0,") != std::string::npos);
}

TEST_CASE("symmetry audit keeps the b pattern") {
    ExperimentConfig c = load_config(data("audit_k8.json"));
    RunRecord r = run_symmetry_audit(c);
    CHECK(r.passed());
    CHECK(r.summary["max_off_pattern"].get<double>() < 1e-6);
    CHECK(r.summary["max_off_pattern_rotated_polygon"].get<double>() < 1e-6);
    CHECK(r.summary["identity_defect"].get<double>() == 0.0);
    c.family = fam(1, 2);
    CHECK_THROWS_AS(run_symmetry_audit(c), InvalidArgument);
}

TEST_CASE("radial runs: no root for k > 2, a root for the k = 2 control") {
    for (int k : {3, 4}) {
        ExperimentConfig c;
        c.spec = make_spec(0, k);
        c.radial.samples = 41;
        RunRecord r = run_radial_nonexistence(c);
        CHECK(r.passed());
        CHECK(r.summary["root_found"] == false);
        CHECK(r.summary["stratum_at_H0"] == 1);
        CHECK(r.shooting.size() == 41);
        CHECK(shooting_csv(r).rfind("s,mismatch,error", 0) == 0);
    }
    ExperimentConfig c;
    c.spec = make_spec(0, 2);
    c.radial.samples = 21;
    RunRecord r = run_radial_nonexistence(c);
    CHECK(r.passed());
    CHECK(r.summary["root_found"] == true);
}

TEST_CASE("cli exit codes") {
    const auto out = scratch("cli");
    CHECK(cli("grid-check --lmax 16") == 0);
    CHECK(cli("family --config " + data("family_bad.json")) == 3);
    CHECK(cli("radial --config " + data("radial_k4.json") + " --out " + out.string()) == 0);
    CHECK(std::filesystem::exists(out / "radial_k4.json"));
    CHECK(std::filesystem::exists(out / "radial_k4_shooting.csv"));
    CHECK(cli("solve --config " + data("missing.json")) == 2);
    CHECK(cli("no-such-verb") != 0);
}
