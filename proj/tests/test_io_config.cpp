#include "dwlab/config.hpp"
#include "dwlab/errors.hpp"
#include "dwlab/io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace dwlab;
using io::Json;

namespace {

EnergyTrace small_trace() {
  EnergyTrace tr;
  tr.times = {0.0, 0.1, 0.2};
  tr.energies = {1.0, 0.9, 0.8100000000000001};
  tr.flux = {0.0, 0.1, 0.18999999999999995};
  tr.initial_norms = {2.0, 7.25, 0.3};
  return tr;
}

}  // namespace

TEST_CASE("doubles round trip through text") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0})
    CHECK(std::stod(io::format_double(x)) == x);
}

TEST_CASE("csv tables") {
  const auto t = io::parse_csv("# comment\na,b\n1,2\n3.5,-4e-3\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == -4e-3);
  CHECK(io::parse_csv(io::to_csv(t)).rows == t.rows);
  CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), InvalidArgument);
  CHECK_THROWS_AS(io::parse_csv("a,b\n1,x\n"), InvalidArgument);
  CHECK(io::pairs_from_csv("x,y\n0.1,1\n0.2,3\n") == std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.2, 3.0}});
}

TEST_CASE("traces round trip") {
  const auto tr = small_trace();
  const auto csv = io::trace_from_csv(io::trace_to_csv(tr));
  CHECK(csv.times == tr.times);
  CHECK(csv.energies == tr.energies);
  CHECK(csv.flux == tr.flux);
  const auto js = io::trace_from_json(Json::parse(io::trace_to_json(tr).dump()));
  CHECK(js.energies == tr.energies);
  CHECK(js.initial_norms.vx == tr.initial_norms.vx);
  CHECK(js.initial_norms.da_v == tr.initial_norms.da_v);
  CHECK(js.initial_norms.weak == tr.initial_norms.weak);

  const auto dir = std::filesystem::temp_directory_path() / "dwlab_io_test";
  io::write_text(dir / "nested" / "trace.json", io::trace_to_json(tr).dump());
  CHECK(io::load_trace(dir / "nested" / "trace.json").flux == tr.flux);
  io::write_text(dir / "trace.csv", io::trace_to_csv(tr));
  CHECK(io::load_trace(dir / "trace.csv").times == tr.times);
  std::filesystem::remove_all(dir);
  CHECK_THROWS(io::read_text(dir / "missing.csv"));
}

TEST_CASE("sampled H round trips") {
  const SampledH H({1.0, 10.0, 100.0}, {1.0, 0.4, 0.1234567890123});
  const auto back = io::sampled_h_from_csv(io::sampled_h_to_csv(H));
  CHECK(back.times() == H.times());
  CHECK(back.values() == H.values());
}

TEST_CASE("gramian csv") {
  const auto op = build_dirichlet_operator(3, 1.0);
  const auto Q = assemble_gramian(op, build_damping(op, DampingProfile::constant(1.0)), 1.0);
  const auto t = io::parse_csv(io::gramian_to_csv(Q));
  CHECK(t.header.size() == 6);
  CHECK(t.header.front() == "w0_1");
  CHECK(t.header.back() == "w1_3");
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows[2][4] == Q.Q(2, 4));
}

TEST_CASE("config parsing") {
  const auto doc = Json::parse(R"({
    "pipeline": "verify-forward", "n_modes": 16, "length": 2.0,
    "damping": {"kind": "interval", "interval": [0.3, 0.7], "amplitude": 2.0},
    "g": {"kind": "power", "p": 0.5, "r0": 10},
    "simulation": {"T": 5, "dt": 0.01},
    "seed": 42
  })");
  const auto c = parse_config(doc);
  CHECK(c.pipeline == "verify-forward");
  CHECK(c.n_modes == 16);
  CHECK(c.damping.alpha == 0.3);
  CHECK(c.damping.beta == 0.7);
  CHECK(c.g.p == 0.5);
  CHECK(c.seed == 42);
  CHECK(c.probes.count == 8);
  CHECK(make_operator(c).n_modes() == 16);
  CHECK(make_rate(c)(4.0) == doctest::Approx(2.0));
  CHECK_FALSE(make_profile(c).is_constant());

  const auto again = parse_config(resolved_json(c));
  CHECK(resolved_json(again).dump() == resolved_json(c).dump());
}

TEST_CASE("config validation") {
  auto bad = [](const char* text) { return parse_config(Json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"simulation": {"dt": -0.1}})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"n_modes": 0})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"pipeline": "nope"})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"colour": 1})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"simulation": {"steps": 3}})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"damping": {"kind": "interval", "interval": [0.7, 0.3]}})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"g": {"kind": "power", "p": -0.25}})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"g": {"kind": "table"}})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"n_modes": "many"})"), InvalidArgument);
  CHECK_THROWS_AS(bad(R"({"pipeline": "fit"})"), InvalidArgument);
  CHECK(parse_config(Json::parse(R"({"nonlinear": {"g": {"kind": "custom-table", "path": "g.csv"}}})"))
            .nonlinear.g.kind == "table");
}

TEST_CASE("probes are deterministic") {
  const auto a = make_probes(16, 4, 7);
  const auto b = make_probes(16, 4, 7);
  const auto c = make_probes(16, 4, 8);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a[i].w0 == b[i].w0);
    CHECK(a[i].w1 == b[i].w1);
  }
  CHECK(a[0].w0 != c[0].w0);
}
