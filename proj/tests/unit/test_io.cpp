#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "helpers.hpp"
#include "levyflow/config.hpp"
#include "levyflow/errors.hpp"
#include "levyflow/serialize.hpp"

using namespace levyflow;
using testutil::diff;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "levyflow_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double read_double(const std::string& bytes, std::size_t index) {
  double v = 0.0;
  std::memcpy(&v, bytes.data() + index * sizeof(double), sizeof(double));
  return v;
}

}  // namespace

TEST_CASE("lattice payload layout") {
  const Torus torus(2, 2 * std::numbers::pi);
  const LatticeField lat = sample_lattice(random_su2_field(torus, 3, 0.3, 2, 1), 5);
  const std::string payload = lattice_payload(lat);
  // sites x d x N^2 entries of (re, im)
  CHECK(payload.size() == static_cast<std::size_t>(25 * 2 * 4 * 16));
  // site 5, mu 1, entry (1, 0)
  const std::size_t entry = ((5 * 2 + 1) * 4 + 1 * 2 + 0) * 2;
  CHECK(read_double(payload, entry) == lat.at(5, 1).matrix()(1, 0).real());
  CHECK(read_double(payload, entry + 1) == lat.at(5, 1).matrix()(1, 0).imag());
  const LatticeField back = lattice_from_payload(torus, 2, 5, payload);
  for (int s = 0; s < back.num_sites(); ++s) {
    CHECK(diff(back.at(s, 0).matrix(), lat.at(s, 0).matrix()) == 0.0);
  }
  CHECK_THROWS_AS(lattice_from_payload(torus, 2, 5, payload.substr(1)), ConfigError);
}

TEST_CASE("lattice files round trip") {
  const fs::path dir = scratch("lattice");
  const Torus torus(3, 1.5);
  const LatticeField lat = sample_lattice(random_su2_field(torus, 2, 0.3, 1, 2), 6);
  const fs::path header = save_lattice(lat, dir / "state");
  CHECK(header == dir / "state.json");
  CHECK(fs::exists(dir / "state.bin"));
  json doc;
  std::ifstream(header) >> doc;
  CHECK(doc.at("format").is_string());
  CHECK(doc.at("resolution") == 6);
  CHECK(doc.at("dim") == 3);
  CHECK(doc.at("dtype") == "complex128-le");
  CHECK(doc.at("data") == "state.bin");
  const LatticeField back = load_lattice(header);
  CHECK(back.torus() == torus);
  CHECK(back.resolution() == 6);
  CHECK(diff(back.at(7, 2).matrix(), lat.at(7, 2).matrix()) == 0.0);
  const GaugeField g = load_field(header);
  CHECK(g.is_lattice());
  CHECK_THROWS_AS(load_lattice(dir / "missing.json"), ConfigError);
  fs::resize_file(dir / "state.bin", 100);
  CHECK_THROWS_AS(load_lattice(header), ConfigError);
}

TEST_CASE("analytic files round trip") {
  const fs::path dir = scratch("analytic");
  const Torus torus(2, 2.0);
  const AnalyticField a = random_su2_field(torus, 4, 0.3, 2, 9);
  const json doc = analytic_to_json(a);
  const AnalyticField b = analytic_from_json(doc);
  REQUIRE(b.modes().size() == a.modes().size());
  const Point x{0.3, 1.7, 0};
  CHECK(diff(GaugeField(b).eval(x)[1].matrix(), GaugeField(a).eval(x)[1].matrix()) == 0.0);
  const fs::path header = save_field(a, dir / "field");
  CHECK(load_field(header).is_analytic());

  json bad = doc;
  bad["modes"][0]["phase"] = "tan";
  CHECK_THROWS_AS(analytic_from_json(bad), ConfigError);
  bad = doc;
  bad["modes"][0]["coeff"][0][0] = json::array({1.0, 0.0});
  CHECK_THROWS_AS(analytic_from_json(bad), ConfigError);
  bad = doc;
  bad.erase("rank");
  CHECK_THROWS_AS(analytic_from_json(bad), ConfigError);
  bad = doc;
  bad["format"] = "other";
  CHECK_THROWS_AS(analytic_from_json(bad), ConfigError);
}

TEST_CASE("config defaults round trip") {
  const json d = default_config_json();
  CHECK(d.at("schema") == kSchemaVersion);
  const ExperimentConfig cfg = parse_config(d);
  CHECK(to_json(cfg) == d);
  CHECK(cfg.curves.size() == 1);
  CHECK(cfg.curves[0].count == 10);
  CHECK(cfg.flow.grid == 64);
  CHECK(cfg.levy.cesaro_n.back() == 64);
  CHECK(make_curves(cfg).size() == 10);
  CHECK(make_field(cfg).is_analytic());
  CHECK(make_flow_initial(cfg).lattice().resolution() == 64);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_config(json{{"schema", 1}}));
  CHECK(parse_config(json{{"schema", 1}, {"checks", 3}}).checks == 3);
  CHECK_THROWS_AS(parse_config(json{{"schema", 2}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"checks", 3}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"chekcs", 3}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"flow", {{"gird", 8}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"torus", {{"dim", 4}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"transport", {{"step", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"levy", {{"cesaro_n", {8, 4}}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
}

TEST_CASE("config overrides") {
  json doc = default_config_json();
  apply_override(doc, "flow.grid=32");
  apply_override(doc, "curves.0.count=3");
  apply_override(doc, "field.kind=zero");
  apply_override(doc, "levy.cesaro_n=[2,4]");
  CHECK(doc["flow"]["grid"] == 32);
  CHECK(doc["curves"][0]["count"] == 3);
  CHECK(doc["field"]["kind"] == "zero");
  CHECK(doc["levy"]["cesaro_n"].size() == 2);
  CHECK_THROWS_AS(apply_override(doc, "flow.grid"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "flow.nope=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "curves.5.count=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "seed.x=3"), ConfigError);
}

TEST_CASE("config files") {
  const fs::path dir = scratch("config");
  CHECK_THROWS_AS(load_config(dir / "absent.json"), ConfigError);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  std::ofstream(dir / "small.json") << R"({"schema": 1, "seed": 5, "flow": {"grid": 16}})";
  const ExperimentConfig cfg = load_config(dir / "small.json", {"flow.ds=1e-3", "seed=6"});
  CHECK(cfg.seed == 6);
  CHECK(cfg.flow.grid == 16);
  CHECK(cfg.flow.ds == 1e-3);
  CHECK(load_config(std::nullopt).seed == 42);
}

TEST_CASE("file fields from config") {
  const fs::path dir = scratch("config_field");
  const AnalyticField a = random_su2_field(Torus(2, 6.283185307179586), 2, 0.3, 1, 4);
  const fs::path header = save_field(a, dir / "a");
  const ExperimentConfig cfg =
      load_config(std::nullopt, {"field.kind=file", "field.path=" + header.string()});
  CHECK(make_field(cfg).analytic().modes().size() == 2);
  const ExperimentConfig wrong = load_config(
      std::nullopt, {"field.kind=file", "field.path=" + header.string(), "torus.length=1.0"});
  CHECK_THROWS_AS(make_field(wrong), ConfigError);
}
