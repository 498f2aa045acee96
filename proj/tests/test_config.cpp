#include <doctest.h>

#include "kdv5/config.hpp"
#include "kdv5/errors.hpp"
#include "kdv5/manifest.hpp"

#include <filesystem>
#include <fstream>

using namespace kdv5;

TEST_CASE("config parsing") {
    const std::string text = R"(# comment line
experiment = decay   # trailing comment
model = kdv5
grid.L = 30
grid.N = 512
solver.t_end = 0.02
solver.scheme = IFRK4
solver.dealias = pad2
solver.stride = 4
data.id = one_sided_decay
data.params = {"n": 1, "origin": 15}
seed = 7
functionals = [{"kind": "energy", "l": 1}, {"kind": "xweighted", "n": 2, "l": 0, "eps": 0.5}]
window.nu = 0.5
l = 1
n = 1
)";
    const auto c = parse_config(text);
    CHECK(c.experiment == ExperimentKind::Decay);
    CHECK(c.model.name == "kdv5");
    CHECK(c.grid.L == 30.0);
    CHECK(c.grid.N == 512);
    CHECK(c.solver.scheme == Scheme::IFRK4);
    CHECK(c.solver.dealias == Dealias::Pad2);
    CHECK(c.data.get("origin", 0.0) == 15.0);
    CHECK(c.seed == 7);
    REQUIRE(c.functionals.size() == 2);
    CHECK(c.functionals[1].kind == "xweighted");
    CHECK(c.functionals[1].eps == 0.5);
    CHECK(c.window.nu == std::vector<double>{0.5});
    CHECK(c.n == 1);
}

TEST_CASE("config models") {
    CHECK(parse_config("model = general_c\nmodel.params = [1, 2, 1]\n").model.hamiltonian());
    const auto c = parse_config(R"(model = {"a5": 1, "monomials": [{"c": -1, "orders": [0, 3]}]})");
    CHECK(c.model.a5 == 1.0);
    CHECK(c.model.monomials.size() == 1);
    CHECK_THROWS_AS(parse_config("model = nosuch\n"), ConfigError);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid.N = 1\ngrid.N = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid.N = 12.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid.L = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just text\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"(functionals = [{"kind": "energy", "q": 1}])"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
    ExperimentConfig c;
    c.solver.stride = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("canonical config JSON") {
    const auto a = parse_config("grid.N = 256\nseed = 3\n");
    const auto b = parse_config("seed = 3\n\ngrid.N = 256   # same\n");
    CHECK(config_to_json(a) == config_to_json(b));
    CHECK(config_to_json(a) != config_to_json(parse_config("grid.N = 256\nseed = 4\n")));
}

TEST_CASE("sha256 and manifests") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

    RunManifest m;
    m.command = "decay";
    m.seed = 9;
    m.tolerances["x"] = 1e-8;
    m.outputs["report.csv"] = sha256_hex("t,functional_id,value\n");
    m.checks["finite"] = true;
    m.pass = true;
    const auto back = RunManifest::from_json(m.to_json());
    CHECK(back.to_json() == m.to_json());
    CHECK(back.seed == 9);
    CHECK(m.to_json().find("time") == std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "kdv5_manifest_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "m.json").string();
    write_atomic(path, m.to_json());
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    CHECK(file_sha256(path) == sha256_hex(m.to_json()));
    std::filesystem::remove_all(dir);
}
