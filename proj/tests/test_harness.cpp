#include <doctest.h>

#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "groupfile.hpp"
#include "record.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

using namespace escapelab;

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("every config field feeds the hash") {
  ExperimentConfig base;
  std::set<std::string> hashes{base.hash()};
  for (const std::string& key : ExperimentConfig::keys()) {
    ExperimentConfig c;
    std::string v = c.raw(key);
    std::string alt;
    if (key == "geometry.kind") alt = "euclidean";
    else if (key == "geometry.n") continue;  // only n = 1 is accepted
    else if (key == "group.kind") alt = "symmetric";
    else if (key == "dynamics.delta_method") alt = "bisection";
    else if (key == "dynamics.compare_delta") alt = "false";
    else if (key == "measures.fiber") alt = "constant";
    else if (key == "measures.base_shape" || key == "semiclassics.base_shape") alt = "gaussian";
    else if (key == "semiclassics.fiber") alt = "bump";
    else if (key == "semiclassics.quantization") alt = "weyl";
    else if (key == "output.format") alt = "csv";
    else if (key == "group.file" || key == "output.directory") alt = "elsewhere";
    else if (v == "auto") alt = "0.75";
    else if (key.find("center") != std::string::npos || key == "measures.xi_angles" ||
             key == "semiclassics.h_list" || key == "dynamics.t_grid") alt = "0.25,0.125";
    else alt = "7";
    c.set(key, alt);
    CHECK_MESSAGE(hashes.insert(c.hash()).second, key);
  }
}

TEST_CASE("config parsing rejects bad input with line numbers") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("[group]\nkind = cyclic\nflavour = 3\n"),
                       doctest::Contains("line 3"), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[nonsense]\n"), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[group]\nlength = 1\nlength = 2\n"), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[dynamics]\nsamples = many\n"), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[geometry]\nn = 2\n"), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[group]\nkind = file\n"), ValidationError);
}

TEST_CASE("config values are normalised") {
  ExperimentConfig c = ExperimentConfig::parse("# comment\n[dynamics]\nt_grid = 0:1:0.25\nseed = 5\n");
  CHECK(c.reals("dynamics.t_grid") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(c.unsigned_integer("dynamics.seed") == 5u);
  CHECK(c.is_auto("geometry.core_radius"));
  ExperimentConfig d = ExperimentConfig::parse("[dynamics]\nseed   =   5\n[dynamics]\nt_grid=0,0.25,0.5,0.75,1\n");
  CHECK(c.canonical() == d.canonical());
  CHECK(c.hash() == d.hash());
}

namespace {

RunRecord sample_record() {
  RunRecord r;
  r.run_id = "demo-01234567-3";
  r.command = "demo";
  r.config_hash = std::string(64, 'a');
  r.config = "x.y = 1\n";
  r.seed = 3;
  r.started = r.finished = "2024-01-01T00:00:00Z";
  r.columns = {"t", "label", "value", "flag"};
  r.add_row({std::int64_t{1}, std::string("plain"), 0.1, true});
  r.add_row({std::int64_t{2}, std::string("a,\"quoted\" one"), std::numeric_limits<double>::infinity(), false});
  r.summary.emplace_back("Q", -1.0);
  r.summary.emplace_back("note", std::string("ok"));
  r.warn("truncation", "cut");
  return r;
}

}  // namespace

TEST_CASE("run records round-trip through JSON") {
  RunRecord r = sample_record();
  CHECK(record_from_json(to_json(r)) == r);
  CHECK_THROWS_AS(r.add_row({std::int64_t{1}}), Error);
}

TEST_CASE("run record schema and layout are checked") {
  std::string j = to_json(sample_record());
  std::string bumped = j;
  bumped.replace(bumped.find("\"schema\": 1"), 11, "\"schema\": 2");
  CHECK_THROWS_AS(record_from_json(bumped), FormatError);
  CHECK_THROWS_AS(record_from_json("{\"schema\": 1}"), FormatError);
  CHECK_THROWS_AS(record_from_json("not json"), FormatError);
}

TEST_CASE("csv output has one header and one line per row") {
  std::string csv = to_csv(sample_record());
  CHECK(csv ==
        "t,label,value,flag\n"
        "1,plain,0.10000000000000001,true\n"
        "2,\"a,\"\"quoted\"\" one\",inf,false\n");
}

TEST_CASE("persisted records load back by run id") {
  auto dir = std::filesystem::temp_directory_path() / "escapelab_record_test";
  std::filesystem::remove_all(dir);
  RunRecord r = sample_record();
  auto paths = persist(r, dir.string(), OutputFormat::Both);
  CHECK(paths.size() == 2);
  CHECK(load_run(dir.string(), r.run_id) == r);
  std::filesystem::remove_all(dir);
}

TEST_CASE("group files round-trip exactly") {
  SchottkyGroup g = SchottkyGroup::symmetric(2, 2.5);
  SchottkyGroup back = parse_group(format_group(g));
  REQUIRE(back.rank() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(back.generators()[k].matrix() == g.generators()[k].matrix());
    CHECK(back.plus_disks()[k].radius == g.plus_disks()[k].radius);
  }
  CHECK_THROWS_AS(parse_group("n = 1\nrank = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_group("n = 1\nrank = 0\ncolour = red\n"), ValidationError);
  CHECK_THROWS_AS(parse_group("n = 1\nrank = 1\ngenerator.1 = 2 0 0 1\nminus.1 = -2 0 1\nplus.1 = 2 0 1\n"),
                  ValidationError);
}

TEST_CASE("experiments carry the config hash and seed in the run id") {
  ExperimentConfig c = ExperimentConfig::parse("[group]\nkind = cyclic\n");
  RunOptions o;
  o.seed = 17;
  RunRecord r = run_experiment("validate-group", c, o);
  CHECK(r.seed == 17u);
  CHECK(r.run_id == make_run_id("validate-group", r.config_hash, 17));
  CHECK(r.config.find("dynamics.seed = 17") != std::string::npos);
  CHECK(r.config_hash == sha256_hex(r.config));
  CHECK(is_experiment("escape-rate"));
  CHECK_FALSE(is_experiment("report"));
}

TEST_CASE("elementary delta record") {
  ExperimentConfig c = ExperimentConfig::parse("[group]\nkind = trivial\n");
  RunRecord r = run_experiment("delta", c);
  REQUIRE(r.rows.size() >= 1);
  CHECK(std::get<double>(*r.summary_value("delta")) == 0.0);
}
