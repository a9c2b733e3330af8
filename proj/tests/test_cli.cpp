#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "gljac/cli.hpp"

namespace fs = std::filesystem;
using gljac::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("gljac_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_temp_files(const fs::path& dir) {
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().find(".tmp") != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("table --gl2") {
    TempDir d;
    const auto r = call({"table", "--gl2", "--q", "3", "--out", d.str()});
    CHECK(r.code == 0);
    const auto j = read_json(d.path / "gl2_q3.json");
    CHECK(j["rows"].size() == 8);
    CHECK(j["tag"] == "gl2");
    CHECK(!has_temp_files(d.path));
  }

  TEST_CASE("table --oracle") {
    TempDir d;
    CHECK(call({"table", "--oracle", "--n", "4", "--q", "2", "--out", d.str()}).code == 0);
    CHECK(read_json(d.path / "oracle_n4_q2.json")["rows"].size() == 14);
    CHECK(call({"table", "--oracle", "--n", "4", "--q", "3", "--out", d.str()}).code == 3);
    CHECK(call({"table", "--oracle", "--n", "2", "--q", "3", "--max-group-order", "10", "--out", d.str()}).code == 3);
  }

  TEST_CASE("invalid parameters exit 2") {
    TempDir d;
    CHECK(call({"table", "--gl2", "--q", "1", "--out", d.str()}).code == 2);
    CHECK(call({"table", "--gl2", "--q", "6", "--out", d.str()}).code == 2);
    CHECK(call({"table", "--q", "3", "--out", d.str()}).code == 2);
    CHECK(call({"verify", "--n", "3", "--q", "2", "--out", d.str()}).code == 2);
    CHECK(call({"verify", "--n", "2", "--q", "3", "--theta0", "4", "--out", d.str()}).code == 2);
    CHECK(call({"table", "--gl2", "--q", "3", "--format", "xml"}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"table", "--gl2", "--q", "notanumber"}).code == 2);
    CHECK(call({}).code == 2);
    CHECK(!fs::exists(d.path / "gl2_q1.json"));
  }

  TEST_CASE("verify writes a passing report") {
    TempDir d;
    const auto r = call({"verify", "--n", "1", "--q", "3", "--theta0", "1", "--out", d.str()});
    CHECK(r.code == 0);
    const auto j = read_json(d.path / "verify_n1_q3.json");
    CHECK(j["all_pass"].get<bool>());
    REQUIRE(j["identities"].size() == 4);
    for (const auto& id : j["identities"]) CHECK(id["pass"].get<bool>());
    CHECK(j["parameters"]["theta0"] == 1);
    CHECK(j["header"].contains("generated_at"));

    CHECK(call({"verify", "--n", "2", "--q", "2", "--theta0", "1", "--out", d.str()}).code == 0);
    CHECK(read_json(d.path / "verify_n2_q2.json")["all_pass"].get<bool>());
  }

  TEST_CASE("verify without an admissible theta0 still writes a report") {
    TempDir d;
    const auto r = call({"verify", "--n", "1", "--q", "2", "--out", d.str()});
    CHECK(r.code == 2);
    const auto j = read_json(d.path / "verify_n1_q2.json");
    CHECK(j["error"].get<std::string>().find("no admissible θ₀") != std::string::npos);
  }

  TEST_CASE("verify csv") {
    TempDir d;
    CHECK(call({"verify", "--n", "1", "--q", "5", "--format", "csv", "--out", d.str()}).code == 0);
    const std::string s = read_text(d.path / "verify_n1_q5.csv");
    CHECK(s.find("cuspidal_jacquet,true,") != std::string::npos);
  }

  TEST_CASE("jacquet decompositions") {
    TempDir d;
    CHECK(call({"jacquet", "--n", "2", "--q", "2", "--out", d.str()}).code == 0);
    const auto j = read_json(d.path / "jacquet_n2_q2.json");
    REQUIRE(j["rows"].size() == 3);
    const auto& basis = j["basis"];
    const auto sp = j["rows"][2]["multiplicities"].get<std::vector<long>>();
    long total = 0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
      total += sp[i];
      if (sp[i] != 0) CHECK(basis[i]["degree"] == 1);
    }
    CHECK(total == 1);

    CHECK(call({"jacquet", "--n", "1", "--q", "3", "--out", d.str()}).code == 0);
    for (long m : read_json(d.path / "jacquet_n1_q3.json")["rows"][2]["multiplicities"].get<std::vector<long>>()) CHECK(m == 0);

    CHECK(call({"jacquet", "--n", "2", "--q", "3", "--out", d.str()}).code == 0);
    const auto k = read_json(d.path / "jacquet_n2_q3.json");
    const auto pp = k["rows"][0]["multiplicities"].get<std::vector<long>>();
    const auto st = k["rows"][1]["multiplicities"].get<std::vector<long>>();
    const auto sp3 = k["rows"][2]["multiplicities"].get<std::vector<long>>();
    for (std::size_t i = 0; i < pp.size(); ++i) {
      CHECK(st[i] >= 0);
      CHECK(st[i] + sp3[i] == pp[i]);
    }
  }

  TEST_CASE("fourier outputs") {
    TempDir d;
    CHECK(call({"fourier", "--n", "1", "--q", "5", "--out", d.str()}).code == 0);
    const auto a = read_json(d.path / "fourier_n1_q5.json");
    // five orbit indicators plus the cone
    CHECK(a["spectra"].size() == 6);

    CHECK(call({"fourier", "--n", "2", "--q", "3", "--orbit", "nilpotent:[2]", "--out", d.str()}).code == 0);
    const auto b = read_json(d.path / "fourier_n2_q3.json");
    REQUIRE(b["spectra"].size() == 1);
    CHECK(b["spectra"][0]["rows"].size() == 12);

    CHECK(call({"fourier", "--n", "2", "--q", "3", "--cone", "--out", d.str()}).code == 0);
    const auto c = read_json(d.path / "fourier_n2_q3.json");
    int zero_rows = 0;
    for (const auto& row : c["spectra"][0]["rows"])
      if (row["size"] == 1 && row["orbit"].get<std::string>().rfind("(x)", 0) == 0) {
        ++zero_rows;
        CHECK(row["re"].get<double>() == doctest::Approx(9.0));
      }
    CHECK(zero_rows == 1);

    CHECK(call({"fourier", "--n", "2", "--q", "3", "--cone", "--format", "csv", "--out", d.str()}).code == 0);
    CHECK(fs::exists(d.path / "fourier_n2_q3.csv"));
    CHECK(read_text(d.path / "fourier_n2_q3_parseval.csv").find(",true") != std::string::npos);

    CHECK(call({"fourier", "--n", "2", "--q", "3", "--orbit", "nilpotent:[4]", "--out", d.str()}).code == 2);
    CHECK(call({"fourier", "--n", "4", "--q", "3", "--out", d.str()}).code == 3);
    CHECK(call({"fourier", "--n", "3", "--q", "3", "--max-space", "1000", "--out", d.str()}).code == 3);
  }

  TEST_CASE("config file with flag override") {
    TempDir d;
    const fs::path cfg = d.path / "run.json";
    std::ofstream(cfg) << nlohmann::json{{"command", "table"}, {"gl2", true}, {"q", 5}, {"out", d.str()}}.dump();
    CHECK(call({"--config", cfg.string()}).code == 0);
    CHECK(fs::exists(d.path / "gl2_q5.json"));
    CHECK(call({"--config", cfg.string(), "table", "--q", "4"}).code == 0);
    CHECK(read_json(d.path / "gl2_q4.json")["rows"].size() == 15);

    std::ofstream(cfg) << nlohmann::json{{"command", "table"}, {"bogus", 1}}.dump();
    CHECK(call({"--config", cfg.string()}).code == 2);
    CHECK(call({"--config", (d.path / "missing.json").string()}).code == 2);
  }

  TEST_CASE("RunConfig JSON round trip") {
    gljac::cli::RunConfig a;
    a.command = "verify";
    a.n = 2;
    a.q = 3;
    a.theta0 = 5;
    a.orbit = "zero";
    gljac::cli::RunConfig b;
    b.merge_json(a.to_json());
    CHECK(b.to_json() == a.to_json());
  }

  TEST_CASE("atomic writes replace whole files") {
    TempDir d;
    const std::string p = (d.path / "x.txt").string();
    gljac::cli::write_atomic(p, "first");
    gljac::cli::write_atomic(p, "second");
    CHECK(read_text(p) == "second");
    CHECK(!has_temp_files(d.path));
  }
}
