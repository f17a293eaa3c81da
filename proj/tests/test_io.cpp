#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qotl/checkpoint.hpp"
#include "qotl/csv.hpp"
#include "qotl/rng.hpp"
#include "qotl/runrecord.hpp"
#include "support/test_util.hpp"

using namespace qotl;

namespace {

double round_trip(double x) {
  return KvReader::from_string("k = " + fmt_double(x) + "\n").get_double("k");
}

}  // namespace

TEST_CASE("doubles survive the text round trip exactly", "[io]") {
  const double values[] = {0.0,    1.0,       -1.5,       0.1,   1.0 / 3.0, 1e300,
                           1e-308, 6.02e23,   -2.2250738585072014e-308, 12345.6789,
                           std::numeric_limits<double>::epsilon()};
  for (double x : values) {
    const double back = round_trip(x);
    REQUIRE(back == x);
  }
  REQUIRE(std::signbit(round_trip(-0.0)));
  REQUIRE(std::isnan(round_trip(std::numeric_limits<double>::quiet_NaN())));
  REQUIRE(round_trip(std::numeric_limits<double>::infinity()) ==
          std::numeric_limits<double>::infinity());
  REQUIRE(fmt_double(0.1) == "0.1");
  REQUIRE(fmt_double(-0.0) == "-0");
}

TEST_CASE("csv rows carry the declared arity", "[io]") {
  CsvWriter w({"a", "b", "c"});
  w.row({std::int64_t{1}, 2.5, std::string("x")});
  REQUIRE(w.str() == "a,b,c\n1,2.5,x\n");
  REQUIRE_THROWS_AS(w.row({std::int64_t{1}, 2.5}), std::invalid_argument);
  REQUIRE_THROWS_AS(CsvWriter({}), std::invalid_argument);
}

TEST_CASE("digests match the published reference vectors", "[io]") {
  REQUIRE(fnv1a64(std::span<const char>("", 0)) == 0xcbf29ce484222325ull);
  REQUIRE(fnv1a64(std::span<const char>("a", 1)) == 0xaf63dc4c8601ec8cull);
  REQUIRE(digest_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");
  REQUIRE(digest_hex(0x0000000000000001ull) == "0000000000000001");

  qotl::test::ScratchDir dir("io");
  const auto path = dir.path / "blob.bin";
  std::ofstream(path, std::ios::binary) << "abc";
  REQUIRE(fnv1a64_file(path) == fnv1a64(std::span<const char>("abc", 3)));
}

TEST_CASE("key-value blocks reread in order with comments skipped", "[io]") {
  KvWriter w;
  w.put("name", std::string("run"));
  w.put("count", std::int64_t{42});
  w.put("scale", 0.125);
  w.put_doubles("xs", {1.5, -2.0, 0.3});
  w.put_ints("ks", {3, 1, 2});
  const std::string with_comments = "# header comment\n\n" + w.str() + "# trailing\n";
  const KvReader r = KvReader::from_string(with_comments);
  REQUIRE(r.get_string("name") == "run");
  REQUIRE(r.get_int("count") == 42);
  REQUIRE(r.get_double("scale") == 0.125);
  REQUIRE(r.get_doubles("xs") == std::vector<double>{1.5, -2.0, 0.3});
  REQUIRE(r.get_ints("ks") == std::vector<int>{3, 1, 2});
  REQUIRE(r.has("name"));
  REQUIRE_FALSE(r.has("missing"));
  REQUIRE_THROWS_AS(r.get_string("missing"), std::runtime_error);
  REQUIRE_THROWS_AS(KvReader::from_string("no separator\n"), std::runtime_error);
}

TEST_CASE("checkpoints reload to an identical model", "[io]") {
  Rng rng(81);
  const CircuitSpec spec = build_ala(4, 3, 2, 2, Entangler::CX, rng);
  qotl::test::ScratchDir dir("ckpt");
  const auto path = dir.path / "checkpoint.txt";

  save_checkpoint(path, spec);
  const Checkpoint plain = load_checkpoint(path);
  REQUIRE_FALSE(plain.opt.has_value());
  REQUIRE(plain.spec.qubits() == 4);
  REQUIRE(plain.spec.layers() == 3);
  REQUIRE(plain.spec.latent_dim() == 2);
  REQUIRE(plain.spec.family() == Family::ALA);
  REQUIRE(plain.spec.entangler() == Entangler::CX);
  REQUIRE(plain.spec.block_size() == 2);
  REQUIRE(plain.spec.xi() == spec.xi());
  REQUIRE(plain.spec.eta() == spec.eta());
  REQUIRE(plain.spec.theta() == spec.theta());

  AdamState opt = AdamState::init(static_cast<std::size_t>(spec.param_count()));
  opt.t = 7;
  for (std::size_t k = 0; k < opt.m.size(); ++k) {
    opt.m[k] = rng.normal(0.0, 1.0);
    opt.v[k] = rng.uniform(0.0, 1.0);
  }
  save_checkpoint(path, spec, &opt);
  const Checkpoint full = load_checkpoint(path);
  REQUIRE(full.opt.has_value());
  REQUIRE(full.opt->t == 7);
  REQUIRE(full.opt->m == opt.m);
  REQUIRE(full.opt->v == opt.v);

  // Save -> load -> save reproduces the file byte for byte.
  const auto second = dir.path / "again.txt";
  save_checkpoint(second, full.spec, &*full.opt);
  REQUIRE(fnv1a64_file(second) == fnv1a64_file(path));
}

TEST_CASE("a rejected checkpoint names the problem", "[io]") {
  qotl::test::ScratchDir dir("badckpt");
  const auto path = dir.path / "bad.txt";
  std::ofstream(path) << "format = something-else\n";
  REQUIRE_THROWS_WITH(load_checkpoint(path),
                      Catch::Matchers::ContainsSubstring("unknown format tag"));
  REQUIRE_THROWS_WITH(load_checkpoint(dir.path / "absent.txt"),
                      Catch::Matchers::ContainsSubstring("cannot open"));
}

TEST_CASE("run records list configuration and output digests", "[io]") {
  qotl::test::ScratchDir dir("record");
  const auto data = dir.path / "table.csv";
  CsvWriter w({"x"});
  w.row({std::int64_t{1}});
  w.write_file(data);

  RunRecord rec;
  rec.tool = "demo";
  rec.set("seed", "5");
  rec.add_output(data);
  rec.started_at = "2000-01-01T00:00:00Z";
  rec.finished_at = "2000-01-01T00:00:01Z";
  const auto path = dir.path / "demo_record.txt";
  write_run_record(path, rec);

  const KvReader r = KvReader::from_file(path);
  REQUIRE(r.get_string("tool") == "demo");
  REQUIRE(r.get_string("version") == kToolVersion);
  REQUIRE(r.get_string("config.seed") == "5");
  REQUIRE(r.get_string("output.table.csv") == "fnv1a:" + digest_hex(fnv1a64_file(data)));
  REQUIRE(r.get_string("started_at") == "2000-01-01T00:00:00Z");
}
