#include <doctest.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QPK_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string cfg(const char* name) { return std::string("--config ") + QPK_DATA + "/" + name; }

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("monopoly summary") {
  const auto r = run("monopoly " + cfg("linear_uniform.json") + " --c2 1");
  CHECK(r.status == 0);
  CHECK(r.out.find("c1*=3.10") != std::string::npos);
  CHECK(r.out.find("RT*=4.306") != std::string::npos);
  CHECK(r.out.find("gamma1*=0.6") != std::string::npos);
}

TEST_CASE("equilibrium on identical servers splits evenly") {
  const auto r = run("equilibrium " + cfg("identical_uniform.json") + " --c1 5 --c2 5 --format json");
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("gamma1").get<double>() == doctest::Approx(1.5));
}

TEST_CASE("revenue sweep") {
  const auto r = run("sweep " + cfg("linear_uniform.json") + " --what revenue --n 400 --c2 1 --format csv");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("gamma1,revenue\n", 0) == 0);
  CHECK(count_lines(r.out) == 401);
  CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("beta1 sweep jumps for unequal servers and not for equal ones") {
  auto max_jump = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    double prev = 0.0;
    double worst = 0.0;
    bool first = true;
    while (std::getline(in, line)) {
      // Away from the ends, where unbounded laws make beta1 blow up.
      const double g = std::stod(line.substr(0, line.find(',')));
      if (g < 0.6 || g > 2.4) continue;
      const double b = std::stod(line.substr(line.find(',') + 1));
      if (!first) worst = std::max(worst, std::abs(b - prev));
      prev = b;
      first = false;
    }
    return worst;
  };
  const auto jump = run("sweep " + cfg("linear_exponential20.json") + " --what beta1 --n 400 --format csv");
  const auto flat = run("sweep " + cfg("identical_exponential.json") + " --what beta1 --n 400 --format csv");
  REQUIRE(jump.status == 0);
  REQUIRE(flat.status == 0);
  CHECK(max_jump(jump.out) > 1.0);
  CHECK(max_jump(flat.out) < 0.2);
}

TEST_CASE("g1 sweep decreases through zero") {
  const auto r = run("sweep " + cfg("mm1_gamma.json") + " --what g1 --n 200 --format csv");
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  double prev = 1e300;
  int sign_changes = 0;
  while (std::getline(in, line)) {
    const double g = std::stod(line.substr(line.find(',') + 1));
    CHECK(g < prev);
    if (prev > 0 && g <= 0) ++sign_changes;
    prev = g;
  }
  CHECK(sign_changes == 1);
}

TEST_CASE("json output is deterministic") {
  const std::string args = "estimate-density " + cfg("saturated_power.json") +
                           " --c2 5 --oracle noisy --noise 0.01 --seed 3 --format json";
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.status == b.status);
  CHECK(a.out == b.out);
}

TEST_CASE("other commands run") {
  CHECK(run("duopoly-symmetric " + cfg("identical_exponential.json")).out.find("necessary_only_failed") !=
        std::string::npos);
  CHECK(run("duopoly-nash " + cfg("identical_uniform.json") + " --format json").status == 0);
  CHECK(run("duopoly-best-response " + cfg("identical_uniform.json") + " --price 3 --server 2").status == 0);
  CHECK(run("estimate-exp " + cfg("linear_exponential.json") + " --c1 3 --c2 1").out.find("tau=4") !=
        std::string::npos);
  CHECK(run("estimate-param " + cfg("mm1_gamma.json") + " --family gamma --c2 1 --prices 2,3,4,5").status == 0);
  const auto dc = run("discover-classes " + cfg("mm1_servers.json") + " --classes 4:1,2:1.5 --format json");
  REQUIRE(dc.status == 0);
  CHECK(nlohmann::json::parse(dc.out).at("classes").size() == 2);
  CHECK(run("sweep " + cfg("identical_uniform.json") + " --what r1-and-c1 --c2 3 --format csv").status == 0);
}

TEST_CASE("exit codes") {
  CHECK(run("monopoly " + cfg("unknown_key.json") + " --c2 1").status == 2);
  CHECK(run("monopoly " + cfg("unstable.json") + " --c2 1").status == 2);
  CHECK(run("monopoly --c2 1").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("sweep " + cfg("linear_uniform.json") + " --what nonsense").status == 3);
  CHECK(run("duopoly-symmetric " + cfg("linear_uniform.json")).status == 3);
  CHECK(run("estimate-exp " + cfg("linear_uniform.json") + " --c1 30 --c2 1").status == 3);
}
