#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(ERGO_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string write_temp_config(const std::string& name, const std::string& content) {
    fs::path dir = fs::temp_directory_path() / "ergo-cli-test";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream(p) << content;
    return p.string();
}

std::string temp_out(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "ergo-cli-test" / name;
    fs::remove_all(dir);
    return dir.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("rates subcommand emits the psi CSV") {
    auto out = temp_out("rates");
    auto r = run("--out " + out + " rates --phi linear:1 --t 0..10:11");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("t,psi") != std::string::npos);
    // psi(1) = e^{-1}
    CHECK(r.output.find("1,0.3678794411") != std::string::npos);
    CHECK(fs::exists(fs::path(out) / "rates" / "psi.csv"));
}

TEST_CASE("missing required key exits 2 and names the key") {
    auto cfg = write_temp_config("missing.cfg", "grid.box = 8\n");
    auto r = run("--config " + cfg + " --out " + temp_out("e1") + " spectral");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("potential.kind") != std::string::npos);
}

TEST_CASE("unknown keys are rejected by the schema") {
    auto cfg = write_temp_config("unknown.cfg",
                                 "potential.kind = quadratic\npotential.kappa = 1\n"
                                 "potentail.typo = 3\n");
    auto r = run("--config " + cfg + " --out " + temp_out("e2") + " spectral");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("potentail.typo") != std::string::npos);
}

TEST_CASE("numerical failures exit 3 without partial artifacts") {
    auto cfg = write_temp_config("blowup.cfg",
                                 "potential.kind = custom\npotential.expr = 0-x1^2\n"
                                 "grid.box = 8\ngrid.n = 801\n");
    auto out = temp_out("e3");
    auto r = run("--config " + cfg + " --out " + out + " spectral");
    CHECK(r.exit_code == 3);
    // no half-written artifacts: the report must not exist, nor any temps
    CHECK_FALSE(fs::exists(fs::path(out) / "spectral" / "report.txt"));
    if (fs::exists(out))
        for (auto& e : fs::recursive_directory_iterator(out))
            CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("verify subcommand reproduces the golden hand certificate") {
    auto cfg = write_temp_config("hand.cfg",
                                 "potential.kind = quadratic\npotential.kappa = 1\n"
                                 "lyapunov.form = custom\nlyapunov.expr = 1+x1^2\n"
                                 "phi.kind = linear\nphi.alpha = 1\n"
                                 "drift.b = 2\ndrift.ball = 1.4142135623730951\n"
                                 "grid.box = 8\ngrid.n = 1601\n");
    auto out = temp_out("golden");
    auto r = run("--config " + cfg + " --out " + out + " verify");
    CHECK(r.exit_code == 0);
    std::string produced = slurp(fs::path(out) / "verify" / "certificate.txt");
    std::string golden = slurp(fs::path(ERGO_TEST_DATA) / "ou_hand_certificate.txt");
    REQUIRE_FALSE(golden.empty());
    CHECK(produced == golden);
}

TEST_CASE("invalid certificates exit 3") {
    auto cfg = write_temp_config("hand_b1.cfg",
                                 "potential.kind = quadratic\npotential.kappa = 1\n"
                                 "lyapunov.form = custom\nlyapunov.expr = 1+x1^2\n"
                                 "phi.kind = linear\nphi.alpha = 1\n"
                                 "drift.b = 1\ndrift.ball = 1.4142135623730951\n"
                                 "grid.box = 8\ngrid.n = 1601\n");
    auto r = run("--config " + cfg + " --out " + temp_out("e4") + " verify");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("INVALID") != std::string::npos);
}

TEST_CASE("bad xi convention flag exits 2") {
    auto r = run("--xi-convention bogus --out " + temp_out("e5") + " rates --phi linear:1");
    CHECK(r.exit_code == 2);
}
