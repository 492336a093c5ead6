// Integration tests driving the nambu binary end to end.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

namespace {

const std::string kCli = NAMBU_CLI_PATH;
const std::string kData = std::string(NAMBU_SOURCE_DIR) + "/data/systems/";

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cmd(const std::string& cmd) {
    RunResult r;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

RunResult run(const std::string& args) { return run_cmd(kCli + " " + args); }

nlohmann::json json_part(const std::string& text) {
    // reports are a JSON object possibly followed by a human-readable line
    std::size_t depth = 0, end = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '{') ++depth;
        if (text[i] == '}') {
            if (--depth == 0) { end = i + 1; break; }
        }
    }
    REQUIRE(end > 0);
    return nlohmann::json::parse(text.substr(0, end));
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = "/tmp/nambu_cli_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("validate reports rank and kernel dimension") {
    RunResult r = run("validate " + kData + "rigid_body.json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("rank 3, kernel dim 0") != std::string::npos);

    RunResult r6 = run("validate " + kData + "r6_semicasimir.json");
    CHECK(r6.exit_code == 0);
    CHECK(r6.out.find("rank 5, kernel dim 1") != std::string::npos);
}

TEST_CASE("validate rejects malformed files with exit 2") {
    std::string repeated = write_temp("repeated.json", R"json({
      "dimension": 4,
      "tensor": {"variance": "contravariant", "kind": "constant",
                 "entries": [{"i": 1, "j": 1, "k": 2, "value": 1.0}]},
      "hamiltonians": {"G": "x1", "H": "x2"}
    })json");
    CHECK(run("validate " + repeated).exit_code == 2);

    std::string range = write_temp("range.json", R"json({
      "dimension": 6,
      "tensor": {"variance": "contravariant", "kind": "constant",
                 "entries": [{"i": 1, "j": 2, "k": 3, "value": 1.0}]},
      "hamiltonians": {"G": "x3 + x7", "H": "x2"}
    })json");
    CHECK(run("validate " + range).exit_code == 2);

    CHECK(run("validate /tmp/does_not_exist_nambu.json").exit_code == 2);
}

TEST_CASE("check passes the canonical system and fails the coupled one") {
    RunResult ok = run("check " + kData + "rigid_body.json --points 40");
    CHECK(ok.exit_code == 0);
    auto j = json_part(ok.out);
    CHECK(j["pass"] == true);
    CHECK(j["closure"]["residual"]["max_abs"] == 0.0);

    RunResult bad = run("check " + kData + "e6_coupled.json --jacobi-induced --points 40");
    CHECK(bad.exit_code == 1);
    auto jb = json_part(bad.out);
    CHECK(jb["jacobi_induced"]["pass"] == false);
    CHECK(jb["jacobi_induced"]["residual"]["max_abs"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(jb["jacobi_induced"]["residual"]["indices"] == nlohmann::json::array({1, 2, 4}));

    RunResult ax = run("check " + kData + "e6_coupled.json --axioms --points 40");
    CHECK(ax.exit_code == 0);
}

TEST_CASE("check reports FI failure for the two-triplet operator") {
    RunResult r = run("check " + kData + "e6_coupled.json --fi --points 30 --fi-tuples 4");
    CHECK(r.exit_code == 1);
    auto j = json_part(r.out);
    CHECK(j["fi"]["residual"]["max_abs"].get<double>() > 1e-3);
}

TEST_CASE("simulate writes a trajectory and a conservation summary") {
    std::string csv = "/tmp/nambu_cli_test_traj.csv";
    RunResult r = run("simulate " + kData + "rigid_body.json --out " + csv);
    CHECK(r.exit_code == 0);
    auto j = json_part(r.out);
    CHECK(j["G"]["rel_drift"].get<double>() <= 1e-8);
    CHECK(j["H"]["rel_drift"].get<double>() <= 1e-8);
    CHECK(std::abs(j["det_monodromy"].get<double>() - 1.0) <= 1e-6);

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x1,x2,x3,G,H,div");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == j["samples"].get<std::size_t>());
}

TEST_CASE("simulate honors --t-end") {
    RunResult r = run("simulate " + kData + "oscillator.json --t-end 1.0 --out ''");
    CHECK(r.exit_code == 0);
    auto j = json_part(r.out);
    CHECK(j["t_end"] == 1.0);
    CHECK(j["samples"] == 101);
}

TEST_CASE("simulate reports evaluation failures with exit 3") {
    std::string domain = write_temp("domain.json", R"json({
      "dimension": 3,
      "tensor": {"variance": "contravariant", "kind": "constant",
                 "entries": [{"i": 1, "j": 2, "k": 3, "value": 1.0}]},
      "hamiltonians": {"G": "log(x1)", "H": "x2"},
      "integrator": {"method": "rk45", "t_span": [0, 1]},
      "initial_state": [-1.0, 0.5, 0.5]
    })json");
    RunResult r = run("simulate " + domain + " --out ''");
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("log of non-positive") != std::string::npos);
}

TEST_CASE("kernel command analyses the two-block R6 system") {
    RunResult r = run("kernel " + kData + "r6_semicasimir.json");
    CHECK(r.exit_code == 0);
    auto j = json_part(r.out);
    CHECK(j["casimir_basis"]["dimension"] == 1);
    auto basis = j["casimir_basis"]["basis"][0];
    for (int i = 0; i < 5; ++i) CHECK(std::abs(basis[static_cast<std::size_t>(i)].get<double>()) <= 1e-12);
    CHECK(std::abs(basis[5].get<double>()) == doctest::Approx(1.0));
    CHECK(j["semi_casimir_pairs"].size() >= 1);

    RunResult e12 = run("kernel " + kData + "e12_casimir.json");
    CHECK(json_part(e12.out)["casimir_basis"]["dimension"] == 2);

    RunResult eps = run("kernel " + kData + "rigid_body.json");
    auto je = json_part(eps.out);
    CHECK(je["casimir_basis"]["dimension"] == 0);
    CHECK(je["semi_casimir_pairs"].empty());
}

TEST_CASE("kernel refuses field-valued tensors with exit 2") {
    std::string field = write_temp("field.json", R"json({
      "dimension": 4,
      "tensor": {"variance": "contravariant", "kind": "field",
                 "entries": [{"i": 1, "j": 2, "k": 3, "expr": "x4"}]},
      "hamiltonians": {"G": "x1", "H": "x2"}
    })json");
    CHECK(run("kernel " + field).exit_code == 2);
}

TEST_CASE("invert writes a loadable inverse and reports the residual") {
    std::string out = "/tmp/nambu_cli_test_inverse.json";
    RunResult r = run("invert " + kData + "eps_covariant.json --out " + out);
    CHECK(r.exit_code == 0);
    auto j = json_part(r.out);
    CHECK(j["verification_residual"].get<double>() <= 1e-12);
    CHECK(j["rank"] == 3);

    std::ifstream in(out);
    auto tensor = nlohmann::json::parse(in);
    CHECK(tensor["variance"] == "contravariant");
    CHECK(tensor["entries"][0]["i"] == 1);
    CHECK(tensor["entries"][0]["j"] == 2);
    CHECK(tensor["entries"][0]["k"] == 3);
    CHECK(tensor["entries"][0]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    // two-triplet block tensor inverts onto itself
    std::string block = write_temp("e6cov.json", R"json({
      "dimension": 6,
      "tensor": {"variance": "covariant", "kind": "constant",
                 "entries": [{"i": 1, "j": 3, "k": 5, "value": 1.0},
                             {"i": 2, "j": 4, "k": 6, "value": 1.0}]},
      "hamiltonians": {"G": "x1", "H": "x2"}
    })json");
    std::string out6 = "/tmp/nambu_cli_test_inverse6.json";
    RunResult r6 = run("invert " + block + " --out " + out6);
    CHECK(r6.exit_code == 0);
    CHECK(json_part(r6.out)["verification_residual"].get<double>() <= 1e-12);
    std::ifstream in6(out6);
    auto t6 = nlohmann::json::parse(in6);
    CHECK(t6["entries"].size() == 2);
    CHECK(t6["entries"][0]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    // rank-deficient input
    std::string deficient = write_temp("deficient.json", R"json({
      "dimension": 5,
      "tensor": {"variance": "covariant", "kind": "constant",
                 "entries": [{"i": 1, "j": 2, "k": 3, "value": 1.0}]},
      "hamiltonians": {"G": "x1", "H": "x2"}
    })json");
    CHECK(run("invert " + deficient).exit_code == 1);
}

TEST_CASE("reports are byte-identical across runs") {
    std::string ok_args = "check " + kData + "rigid_body.json --points 50";
    RunResult a = run(ok_args);
    RunResult b = run(ok_args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);

    // a failing report is just as deterministic: the block operator honestly
    // flunks the fundamental identity on random tuples
    std::string fi_args = "check " + kData + "e6_block.json --points 50";
    RunResult f1 = run(fi_args);
    RunResult f2 = run(fi_args);
    CHECK(f1.exit_code == 1);
    CHECK(json_part(f1.out)["fi"]["pass"] == false);
    CHECK(json_part(f1.out)["jacobi_induced"]["pass"] == true);
    CHECK(f1.out == f2.out);

    RunResult k1 = run("kernel " + kData + "r6_semicasimir.json");
    RunResult k2 = run("kernel " + kData + "r6_semicasimir.json");
    CHECK(k1.out == k2.out);
}

TEST_CASE("NAMBU_SEED overrides the file seed") {
    std::string args = "check " + kData + "rigid_body.json --axioms --points 20";
    RunResult base = run(args);
    RunResult forced = run_cmd("env NAMBU_SEED=99 " + kCli + " " + args);
    CHECK(json_part(base.out)["seed"] == 1);
    CHECK(json_part(forced.out)["seed"] == 99);
}
