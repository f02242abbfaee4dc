#include "doctest.h"

#include "../support/sf_oracle.hpp"
#include "floer/cli.hpp"
#include "floer/continuation.hpp"
#include "floer/json_util.hpp"
#include "floer/morse_lab.hpp"
#include "floer/spectral_flow.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace floer;
namespace fs = std::filesystem;

namespace {

const std::string data_dir = FLOER_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return data_dir + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "floer-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("cli validate") {
  auto ok = run({"validate", data("s2-height.fcd")});
  CHECK(ok.code == 0);
  CHECK(contains(ok.out, "valid: true"));

  auto bad = run({"validate", data("mutated/s2-height-bad-sign.fcd")});
  CHECK(bad.code == 2);
  CHECK(contains(bad.out, "moduli-corners: FAILED"));
  CHECK(contains(bad.err, "moduli-corners"));

  CHECK(run({"validate", data("missing.fcd")}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"validate"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
}

TEST_CASE("cli homology tables") {
  auto s2 = run({"homology", data("s2-height.fcd")});
  CHECK(s2.code == 0);
  CHECK(contains(s2.out, "H_0 = Z\n  H_1 = 0\n  H_2 = Z\n"));

  auto t2 = run({"homology", data("t2-flat-height.fcd")});
  CHECK(contains(t2.out, "H_0 = Z\n  H_1 = Z^2\n  H_2 = Z\n"));

  for (const std::string flag : {"--stable=8", "--stable"}) {
    auto st = run({"homology", data("s1-constant.fcd"), flag});
    CHECK(st.code == 0);
    CHECK(contains(st.out, "H_0 = Z\n  H_1 = Z^2\n  H_2 = Z\n"));
  }
  auto co = run({"homology", data("t2-flat-height.fcd"), "--cohomology"});
  CHECK(contains(co.out, "H^1 = Z^2"));
  auto eq = run({"homology", data("s2-height.fcd"), "--equivariant=6"});
  CHECK(eq.code == 0);
  CHECK(contains(eq.out, "equivariant_cohomology:"));
  auto morse = run({"homology", data("s2-tilted-morse.fcd"), "--morse"});
  CHECK(morse.code == 0);
  CHECK(contains(morse.out, "H_0 = Z\n  H_1 = 0\n  H_2 = Z\n"));

  CHECK(run({"homology", data("mutated/s2-height-bad-sign.fcd")}).code == 2);
  CHECK(run({"homology", data("s2-height.fcd"), "--stable=2"}).code == 1);
  CHECK(run({"homology", data("s2-height.fcd"), "--morse", "--stable"}).code == 1);
}

TEST_CASE("cli json and text carry the same numbers") {
  for (const auto& name : {"s2-height", "t2-flat-height", "s1xs2-product"}) {
    CAPTURE(name);
    auto text = run({"homology", data(std::string(name) + ".fcd")});
    auto js = run({"homology", data(std::string(name) + ".fcd"), "--json"});
    REQUIRE(js.code == 0);
    const auto j = json_util::parse(js.out, "report");
    CHECK(j["exit_code"] == 0);
    for (const auto& g : j["data"]["homology"]) {
      std::string line = "H_" + std::to_string(g["degree"].get<int>()) + " = ";
      const auto b = g["betti"].get<std::size_t>();
      line += b == 0 ? "0" : b == 1 ? "Z" : "Z^" + std::to_string(b);
      CHECK(contains(text.out, line + "\n"));
    }
  }
}

TEST_CASE("cli compare") {
  auto pair = run({"compare", data("s2-height.fcd"), data("s2-tilted-morse.fcd"), data("s2-transitions.json")});
  CHECK(pair.code == 0);
  CHECK(contains(pair.out, "verified: true"));

  auto tampered =
      run({"compare", data("s2-height.fcd"), data("s2-tilted-morse.fcd"), data("s2-transitions-tampered.json")});
  CHECK(tampered.code == 2);
  CHECK(contains(tampered.err, "step1-homotopy"));

  // Identity comparison of a category with itself.
  auto a = std::make_shared<const FlowCategory>(load_fcd(data("t2-flat-height.fcd")));
  TransitionFile f;
  TransitionData id = identity_transition(a);
  f.transitions.push_back(id);
  f.homotopies.push_back({"theta", id, {}});
  f.protocol = {{"forward", id.name}, {"backward", id.name}, {"glue_fwd_bwd", "theta"}, {"glue_to_identity", "theta"}};
  const auto path = scratch("identity.json");
  store_transitions(f, *a, *a, path.string());
  auto same = run({"compare", data("t2-flat-height.fcd"), data("t2-flat-height.fcd"), path.string()});
  CHECK(same.code == 0);

  CHECK(run({"compare", data("s2-height.fcd"), data("s2-tilted-morse.fcd"), data("missing.json")}).code == 1);
}

TEST_CASE("cli morse") {
  const auto out = scratch("s2.fcd");
  auto r = run({"morse", "s2-height", "--emit", out.string()});
  CHECK(r.code == 0);
  CHECK(to_fcd_json(load_fcd(out.string())) == to_fcd_json(lab::run_example(lab::example("s2-height")).category));

  const auto t2 = scratch("t2.fcd");
  CHECK(run({"morse", "t2-flat-height", "--emit", t2.string()}).code == 0);
  CHECK(validate(load_fcd(t2.string())).ok);
  CHECK(run({"validate", t2.string()}).code == 0);

  CHECK(run({"morse", "no-such-example"}).code == 1);

  const auto described = scratch("custom.json");
  std::ofstream(described) << R"({"manifold": "torus", "R": 3, "r": 1, "linear": [0, 0, 1], "resolution": 6})";
  auto custom = run({"morse", described.string(), "--json"});
  CHECK(custom.code == 0);
  const auto j = json_util::parse(custom.out, "report");
  CHECK(j["data"]["lab"]["category"] == "custom");

  std::ofstream(scratch("bad.json")) << R"({"manifold": "torus", "R": 1, "r": 3})";
  CHECK(run({"morse", scratch("bad.json").string()}).code == 1);
  std::ofstream(scratch("flat.json")) << R"({"manifold": "sphere", "quadratic": [[1,0,0],[0,1,0],[0,0,1]]})";
  CHECK(run({"morse", scratch("flat.json").string()}).code == 2);
}

TEST_CASE("cli sf") {
  const auto constant = scratch("constant.txt");
  std::ofstream(constant) << "2 2\n0 1 0 -1\n1 1 0 -1\n";
  auto c = run({"sf", constant.string(), "--json"});
  CHECK(c.code == 0);
  CHECK(json_util::parse(c.out, "report")["data"]["spectral_flow"][0]["spectral_flow"] == 0);

  auto up = run({"sf", data("paths/crossing.txt")});
  CHECK(contains(up.out, "spectral_flow=1"));
  CHECK(run({"sf", data("paths/degenerate.txt")}).code == 2);
  CHECK(run({"sf", data("paths/missing.txt")}).code == 1);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto poly = oracle::random_poly_path(rng, 4, 3, 0.05);
    std::vector<std::pair<double, SymMatrix>> samples;
    for (int k = 0; k <= 64; ++k) samples.emplace_back(k / 64.0, poly.at(k / 64.0));
    const auto path = OperatorPath::from_samples(samples);
    const auto file = scratch("random.txt");
    std::ofstream(file) << format_operator_path(path);
    auto r = run({"sf", file.string(), "--json", "--tolerance", "0.01"});
    REQUIRE(r.code == 0);
    CHECK(json_util::parse(r.out, "report")["data"]["spectral_flow"][0]["spectral_flow"] ==
          oracle::spectral_flow(path));
  }

  auto g = run({"sf", "--grading", "ref", "ref=" + data("paths/crossing.txt"),
                "x=" + data("paths/rotation.txt"), "--correction", "x=2"});
  CHECK(g.code == 0);
  CHECK(contains(g.out, "ref = 0"));
  CHECK(contains(g.out, "x = 2"));
  CHECK(run({"sf", "--grading", "ref", data("paths/crossing.txt")}).code == 1);
  CHECK(run({"sf", "--grading", "ref", "ref=" + data("paths/crossing.txt"), "--correction", "x=two"}).code == 1);
}
