#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "lossnet_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string& name, const std::string& body) {
  const auto p = workdir() / name;
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run cli(const std::string& args) {
  const auto out = workdir() / "stdout.txt";
  const std::string cmd =
      std::string("\"") + LOSSNET_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  return r;
}

nlohmann::json as_json(const Run& r) { return nlohmann::json::parse(r.out); }

const std::string kInst32 = R"({"m": 2, "n": [3, 2], "phi": 1, "mu": 1, "q": 0.5})";

}  // namespace

TEST_CASE("solve-opt") {
  const auto inst = write("i41.json", R"({"m": 2, "n": [4, 1], "phi": 1, "mu": 1, "q": 0.5})");
  const auto r = cli("solve-opt --instance " + inst.string() + " --oracle");
  REQUIRE(r.code == 0);
  const auto j = as_json(r);
  CHECK(j["tr"].get<double>() == doctest::Approx(1.35));
  CHECK(j["flow"] == nlohmann::json::parse("[[3,1],[0,1]]"));
  CHECK(j["oracle"]["tr"].get<double>() == doctest::Approx(1.35));
}

TEST_CASE("check-ne and enumerate-ne") {
  const auto inst = write("i32.json", kInst32);
  const auto dp = write("dp.json", R"({"flow": [[3, 0], [0, 2]]})");
  auto r = cli("check-ne --oracle --instance " + inst.string() + " --profile " + dp.string());
  REQUIRE(r.code == 0);
  CHECK(as_json(r)["is_ne"] == true);
  CHECK(as_json(r)["oracle"]["is_ne"] == true);

  const auto off = write("off.json", R"({"flow": [[3, 0], [1, 1]]})");
  r = cli("check-ne --instance " + inst.string() + " --profile " + off.string());
  REQUIRE(r.code == 0);
  CHECK(as_json(r)["is_ne"] == false);
  CHECK_FALSE(as_json(r)["violations"].empty());

  const auto csv = workdir() / "ne.csv";
  r = cli("enumerate-ne --instance " + inst.string() + " --out " + csv.string());
  REQUIRE(r.code == 0);
  CHECK(as_json(r)["count"] == 1);
  const auto text = slurp(csv);
  CHECK(text.rfind("flow_0_0,flow_0_1,flow_1_0,flow_1_1,u_0,u_1,v_0,v_1,tr\n3,0,0,2,3,2,0,0,", 0) == 0);
}

TEST_CASE("poa, dynamics and two-source") {
  const auto inst = write("i32.json", kInst32);
  auto r = cli("poa --instance " + inst.string());
  REQUIRE(r.code == 0);
  auto j = as_json(r);
  CHECK(j["poa_bound"].is_null());
  CHECK(j["opt_upper"].get<double>() == doctest::Approx(1.5));

  const auto start = write("start.json", R"({"flow": [[0, 3], [2, 0]]})");
  r = cli("dynamics --instance " + inst.string() + " --start " + start.string() + " --seed 4");
  REQUIRE(r.code == 0);
  j = as_json(r);
  CHECK(j["outcome"] == "converged");
  CHECK(j["flow"] == nlohmann::json::parse("[[3,0],[0,2]]"));

  r = cli("two-source --instance " + inst.string() + " scan");
  REQUIRE(r.code == 0);
  CHECK(as_json(r)["states"] == nlohmann::json::parse("[[3,2]]"));

  r = cli("two-source --instance " + inst.string() + " classify --u1 3 --u2 1");
  REQUIRE(r.code == 0);
  CHECK(as_json(r)["case"] == "1a");

  // Larger source listed second: states come back in the given labelling.
  const auto swapped = write("i23.json", R"({"m": 2, "n": [2, 3], "phi": 1, "mu": 1, "q": 0.5})");
  r = cli("two-source --instance " + swapped.string() + " existence");
  REQUIRE(r.code == 0);
  CHECK(as_json(r)["state"] == nlohmann::json::parse("[2,3]"));

  r = cli("two-source --instance " + inst.string() + " corollaries");
  REQUIRE(r.code == 0);
  CHECK(as_json(r)["all_relay_iff"] == "pass");
}

TEST_CASE("simulate") {
  const auto inst = write("sim.json", R"({"m": 2, "n": [3, 2], "phi": 1, "mu": 1, "q": 0.3})");
  const auto links = workdir() / "links.csv";
  const auto r = cli("simulate --instance " + inst.string() +
                     " --horizon 20000 --seed 3 --validate --links-csv " + links.string());
  REQUIRE(r.code == 0);
  const auto j = as_json(r);
  CHECK(j["conserved"] == true);
  CHECK(j["links"].size() == 2);
  CHECK(j["validation"]["checks"].size() == 4);
  CHECK(slurp(links).rfind("link,offered,blocked,empirical,analytic,std_err\n", 0) == 0);
  CHECK(cli("simulate --instance " + inst.string() + " --horizon 20000 --seed 3").out ==
        cli("simulate --instance " + inst.string() + " --horizon 20000 --seed 3").out);
}

TEST_CASE("sweep") {
  const auto spec = write("spec.json", R"({
    "base": {"m": 2, "n": [30, 10], "phi": 1, "mu": 10, "q": 0},
    "axis": "q", "grid": {"from": 0, "to": 1, "points": 6},
    "outputs": ["poa_exact"]})");
  const auto a = workdir() / "a.csv";
  const auto b = workdir() / "b.csv";
  const auto plots = workdir() / "plots";
  REQUIRE(cli("sweep --spec " + spec.string() + " --out " + a.string() + " --plot-dir " + plots.string()).code == 0);
  REQUIRE(cli("sweep --spec " + spec.string() + " --out " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("q,tr_opt,", 0) == 0);
  CHECK(fs::exists(plots / "poa_exact.dat"));
  CHECK(fs::exists(plots / "plot.gp"));
}

TEST_CASE("exit codes") {
  const auto inst = write("i32.json", kInst32);
  CHECK(cli("").code == 2);
  CHECK(cli("solve-opt").code == 2);
  CHECK(cli("solve-opt --instance /nonexistent/x.json").code == 2);

  const auto bad_q = write("badq.json", R"({"m": 2, "n": [3, 2], "phi": 1, "mu": 1, "q": 2})");
  CHECK(cli("solve-opt --instance " + bad_q.string()).code == 2);
  const auto bad_m = write("badm.json", R"({"m": 3, "n": [3, 2], "phi": 1, "mu": 1, "q": 0.1})");
  CHECK(cli("poa --instance " + bad_m.string()).code == 2);
  const auto garbage = write("garbage.json", "{not json");
  CHECK(cli("poa --instance " + garbage.string()).code == 2);

  const auto rowsum = write("rowsum.json", R"({"flow": [[3, 1], [0, 2]]})");
  CHECK(cli("check-ne --instance " + inst.string() + " --profile " + rowsum.string()).code == 2);

  const auto big = write("big.json", R"({"m": 4, "n": [40, 40, 40, 40], "phi": 1, "mu": 1, "q": 0.2})");
  CHECK(cli("enumerate-ne --instance " + big.string() + " --cap 1000").code == 3);
  CHECK(cli("solve-opt --oracle --cap 1000 --instance " + big.string()).code == 3);
  CHECK(cli("solve-opt --instance " + big.string()).code == 0);

  const auto three = write("three.json", R"({"m": 3, "n": [3, 2, 1], "phi": 1, "mu": 1, "q": 0.2})");
  CHECK(cli("two-source --instance " + three.string() + " scan").code == 2);
}
