#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lyubich/cli.hpp"

using namespace lyubich;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "lyubich_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("configuration errors exit with code 2") {
  CHECK(call({"preimages", "--num", "1,x", "--den", "1,0"}).code == cli::kConfigError);
  CHECK(call({"preimages", "--num", "0,0", "1,0", "--den", "1,0"}).code == cli::kConfigError);  // degree 1
  CHECK(call({"preimages", "--map", "nope"}).code == cli::kConfigError);
  CHECK(call({"bogus"}).code == cli::kConfigError);
  CHECK(call({"verify", "bogus"}).code == cli::kConfigError);
  CHECK(call({"tree", "--map", "quad", "--w", "0", "--depth", "3"}).code == cli::kConfigError);
  CHECK(call({"tree", "--depth", "30", "--budget", "100"}).code == cli::kConfigError);
  CHECK(call({"measure", "--f", "nonsense"}).code == cli::kConfigError);
  CHECK(call({"--config", "/nonexistent/config.json", "preimages"}).code == cli::kConfigError);
}

TEST_CASE("preimages of a custom map") {
  const auto r = call({"preimages", "--num", "-2,0", "0", "1", "--w", "-2,0", "--json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["atoms"].size() == 1);
  CHECK(j["atoms"][0]["mult"] == 2);
  CHECK(j["map"] == "custom");
}

TEST_CASE("measure moment on z^2-2") {
  const auto r = call({"measure", "--map", "chebyshev", "--depth", "14", "--f", "x^2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j[0]["value"].get<double>() - 2.0) < 0.02);
  CHECK(j[0]["m"] == 14);
}

TEST_CASE("csv exports") {
  const auto tree = call({"tree", "--map", "chebyshev", "--w", "2", "--depth", "2"});
  REQUIRE(tree.code == 0);
  CHECK(tree.out.rfind("level,re,im,cumulative_mult,parent_index\n", 0) == 0);

  const auto julia = call({"julia", "--map", "quad", "--size", "16"});
  REQUIRE(julia.code == 0);
  CHECK(std::count(julia.out.begin(), julia.out.end(), '\n') == 17);

  const auto csv = scratch("atoms.csv");
  REQUIRE(call({"measure", "--map", "quad", "--depth", "3", "--csv", csv.string()}).code == 0);
  CHECK(slurp(csv).rfind("re,im,weight_num,weight_depth\n", 0) == 0);
}

TEST_CASE("config file with flag overrides") {
  const auto cfg = scratch("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"map": "chebyshev", "depth": 3, "f": ["x^2", "x^4"], "w": [2, 0]})";
  }
  const auto base = call({"--config", cfg.string(), "measure"});
  REQUIRE(base.code == 0);
  const auto j = nlohmann::json::parse(base.out);
  CHECK(j.size() == 2);
  CHECK(j[0]["m"] == 3);
  CHECK(j[0]["map"] == "chebyshev");

  const auto over = call({"--config", cfg.string(), "measure", "--depth", "2", "--f", "x"});
  REQUIRE(over.code == 0);
  const auto k = nlohmann::json::parse(over.out);
  CHECK(k.size() == 1);
  CHECK(k[0]["m"] == 2);

  {
    std::ofstream f(cfg);
    f << R"({"mapp": "quad"})";
  }
  CHECK(call({"--config", cfg.string(), "measure"}).code == cli::kConfigError);
}

TEST_CASE("transfer, converge and basis commands") {
  const auto t = call({"transfer", "--map", "quad", "--f", "abs2", "--points", "4,0;0,1"});
  REQUIRE(t.code == 0);
  const auto tj = nlohmann::json::parse(t.out);
  CHECK(tj[0]["values"][0]["re"].get<double>() == doctest::Approx(4.0));
  CHECK(tj[0]["values"][1]["re"].get<double>() == doctest::Approx(1.0));

  const auto c = call({"converge", "--map", "quad", "--depths", "2,4", "--f", "re2"});
  REQUIRE(c.code == 0);
  CHECK(nlohmann::json::parse(c.out).size() == 4);

  const auto b = call({"basis", "--map", "quad", "--size", "1024", "--r", "0.4"});
  REQUIRE(b.code == 0);
  const auto bj = nlohmann::json::parse(b.out);
  CHECK(bj["size"] == 8);
  CHECK(bj["elements"].size() == 8);
}

TEST_CASE("verify reports are deterministic") {
  const auto a = scratch("verify_a.json");
  const auto b = scratch("verify_b.json");
  const std::vector<std::string> base{"verify", "all", "--map", "chebyshev", "--depth", "5", "--seed", "3",
                                      "--trials", "10", "--size", "256"};
  auto args_a = base;
  args_a.insert(args_a.end(), {"--out", a.string()});
  auto args_b = base;
  args_b.insert(args_b.end(), {"--out", b.string()});
  const auto ra = call(args_a);
  const auto rb = call(args_b);
  CHECK(ra.code == 0);
  CHECK(rb.code == 0);
  const std::string ta = slurp(a);
  CHECK_FALSE(ta.empty());
  CHECK(ta == slurp(b));
  const auto j = nlohmann::json::parse(ta);
  for (const auto& rec : j) {
    CHECK(rec.contains("identity"));
    CHECK(rec.contains("tolerance"));
    CHECK(rec["pass"] == true);
  }
}

TEST_CASE("single identity and vanishing bump option") {
  const auto r = call({"verify", "vanishing", "--map", "chebyshev", "--depth", "6", "--bump", "1,0,0.5", "--json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["identity"] == "vanishing");
  CHECK(j[0]["N"].get<int>() > 0);
  CHECK(call({"verify", "vanishing", "--map", "chebyshev", "--depth", "6", "--bump", "0.2,0,0.5"}).code ==
        cli::kConfigError);
}
