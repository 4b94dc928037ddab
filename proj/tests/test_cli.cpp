#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "optocav/cli.hpp"

using Json = nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
    Json json() const { return Json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = optocav::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

const std::vector<std::string> p0 = {"--omega-c", "1", "--omega-m", "0.3", "--g", "0.01",
                                     "--cutoff-photon", "12", "--cutoff-phonon", "12"};

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> extra) {
    base.insert(base.end(), extra);
    return base;
}

const Json& row(const Json& report, const std::string& id) {
    for (const auto& r : report["results"])
        if (r["id"] == id)
            return r;
    FAIL("no result row " << id);
    static Json none;
    return none;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "optocav_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("report schema") {
    const auto o = run(with(p0, {"params"}));
    REQUIRE(o.code == 0);
    const auto j = o.json();
    for (const char* key : {"config", "derived_params", "results", "warnings", "version"})
        CHECK(j.contains(key));
    CHECK(j["derived_params"]["omega_m"] == 0.3);
}

TEST_CASE("shifts at P0") {
    const auto o = run(with(p0, {"shifts"}));
    REQUIRE(o.code == 0);
    const auto j = o.json();
    const auto& eq10 = row(j, "eq10");
    CHECK(eq10["formula_value"].get<double>() == doctest::Approx(-7.28900e-5).epsilon(1e-5));
    CHECK(eq10["status"] == "pass");
    CHECK(std::abs(eq10["oracle_value"].get<double>() - eq10["formula_value"].get<double>()) <=
          1e-3 * 7.289e-5);
    for (const char* key : {"id", "formula_value", "oracle_value", "delta", "tolerance", "status"})
        CHECK(eq10.contains(key));
    CHECK_FALSE(j["convergence"].empty());
}

TEST_CASE("mechanical parameters") {
    const auto o = run({"--mass", "5e5", "--spring-constant", "4.5e4", "--length", "1", "--modes", "1", "params"});
    REQUIRE(o.code == 0);
    const auto d = o.json()["derived_params"];
    CHECK(d["omega_m"].get<double>() == doctest::Approx(0.3));
    CHECK(d["omega_c"].get<double>() == doctest::Approx(3.14159265358979));
    CHECK(d["g"].get<double>() == doctest::Approx(-5.736e-3).epsilon(1e-3));
}

TEST_CASE("resonance exits with a physics error") {
    const auto o = run({"--omega-c", "1", "--omega-m", "2", "--g", "0.01", "shifts"});
    CHECK(o.code == 3);
    const auto j = o.json();
    REQUIRE(j["errors"].size() == 1);
    CHECK(j["errors"][0]["kind"] == "pole");
}

TEST_CASE("validation errors exit 2") {
    CHECK(run({"params"}).code == 2);
    CHECK(run({"--omega-c", "1", "--omega-m", "0.3", "params"}).code == 2);
    CHECK(run(with(p0, {"--mass", "1", "params"})).code == 2);
    CHECK(run({"--omega-c", "x", "--omega-m", "0.3", "--g", "0.1", "params"}).code == 2);
    CHECK(run({"--omega-c", "-1", "--omega-m", "0.3", "--g", "0.1", "params"}).code == 2);
    CHECK(run(with(p0, {"--bogus", "params"})).code == 2);
    CHECK(run(with(p0, {"--format", "xml", "params"})).code == 2);
    CHECK(run(with(p0, {"sweep", "--sweep", "mass=1:2:3"})).code == 2);
    CHECK(run(with(p0, {"--cutoff-photon", "0", "params"})).code == 2);
    CHECK(run(with(p0, {"params"})).code == 0);
}

TEST_CASE("help exits cleanly") {
    const auto o = run({"--help"});
    CHECK(o.code == 0);
    CHECK(o.out.find("shifts") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical reports") {
    for (const auto& sub : {"shifts", "zfactors", "loops", "vertex"}) {
        const auto a = run(with(p0, {sub}));
        const auto b = run(with(p0, {sub}));
        CHECK(a.out == b.out);
    }
    const auto a = run(with(p0, {"sweep", "--sweep", "g=0.001:0.01:7", "--quantity", "ground_shift", "--threads", "1"}));
    const auto b = run(with(p0, {"sweep", "--sweep", "g=0.001:0.01:7", "--quantity", "ground_shift", "--threads", "4"}));
    REQUIRE(a.code == 0);
    CHECK(a.out.substr(a.out.find("\"results\"")) == b.out.substr(b.out.find("\"results\"")));
}

TEST_CASE("sweeps") {
    const auto empty = run(with(p0, {"sweep", "--sweep", "g=0.001:0.01:0"}));
    REQUIRE(empty.code == 0);
    CHECK(empty.json()["series"].empty());

    const auto o = run(with(p0, {"sweep", "--sweep", "omega_m=0.3:1.5:3", "--quantity", "delta_omega_m"}));
    REQUIRE(o.code == 0);
    const auto s = o.json()["series"][0];
    CHECK(s["x"].size() == 3);
    CHECK(s["re"][0].get<double>() == doctest::Approx(-7.289e-5).epsilon(1e-4));

    // a resonant point is recorded, the rest still computed
    const auto bad = run(with(p0, {"sweep", "--sweep", "omega_m=1:2:3", "--quantity", "delta_omega_m"}));
    REQUIRE(bad.code == 0);
    const auto j = bad.json();
    CHECK(j["errors"].size() == 1);
    CHECK(j["series"][0]["re"][2].is_null());
    CHECK(j["series"][0]["re"][0].is_number());
}

TEST_CASE("z-factor report flags printed-formula deltas") {
    const auto o = run({"--omega-c", "1", "--omega-m", "0.3", "--g", "0.001", "--cutoff-photon", "12",
                        "--cutoff-phonon", "12", "zfactors"});
    REQUIRE(o.code == 0);
    const auto j = o.json();
    CHECK(row(j, "z-|0,1>-state-sum")["status"] == "pass");
    CHECK(row(j, "z-|1,0>-state-sum")["status"] == "pass");
    CHECK(row(j, "eq13")["status"] == "reported");
    bool flagged = false;
    for (const auto& d : j["paper_deltas"])
        flagged |= d["id"] == "eq13";
    CHECK(flagged);
}

TEST_CASE("loops report exact strings") {
    const auto j = run(with(p0, {"loops"})).json();
    CHECK(row(j, "eq8")["exact_oracle"] == "1/34000 i");
    CHECK(row(j, "eq8")["status"] == "pass");
    CHECK(row(j, "propagator-n3")["status"] == "pass");
}

TEST_CASE("rotating-wave flag") {
    const auto j = run(with(p0, {"--rotating-wave", "shifts"})).json();
    CHECK(row(j, "eq10")["formula_value"] == 0.0);
    CHECK(j["config"]["rotating_wave"] == true);
}

TEST_CASE("output file and csv") {
    const auto path = scratch("decay.csv");
    std::filesystem::remove(path);
    const auto o = run(with(p0, {"--format", "csv", "--out", path.string(), "decay", "--points", "20"}));
    REQUIRE(o.code == 0);
    CHECK(o.out.empty());
    std::ifstream in(path);
    std::string header, columns, first;
    std::getline(in, header);
    std::getline(in, columns);
    std::getline(in, first);
    CHECK(header.rfind("# {", 0) == 0);
    CHECK(columns == "t,re,im");
    CHECK(first.rfind("0,", 0) == 0);

    CHECK(run(with(p0, {"--out", "/nonexistent-dir/x.json", "params"})).code == 2);
    CHECK(run(with(p0, {"--format", "csv", "params"})).code == 2);
}

TEST_CASE("config files") {
    const auto path = scratch("run.ini");
    {
        std::ofstream os(path);
        os << "omega_c = 1\nomega_m = 0.3\ng = 0.01\ncutoff_photon = 12\ncutoff_phonon = 12\n"
              "[vertex]\ne1 = 1\ne2 = 0.5\n";
    }
    const auto o = run({"--config", path.string(), "vertex"});
    REQUIRE(o.code == 0);
    const auto j = o.json();
    CHECK(j["config"]["e1"] == "1");
    CHECK(row(j, "eq18-dce")["status"] == "pass");
}
