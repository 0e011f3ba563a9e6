#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spillover/error.hpp"
#include "spillover/pair_csv.hpp"
#include "spillover/report.hpp"
#include "spillover/simulator.hpp"

using namespace spillover;

namespace {

const std::string kFixtures = SPILLOVER_FIXTURE_DIR;

} // namespace

TEST_CASE("three well-formed pairs") {
  const auto loaded = load_pair_csv(kFixtures + "/three_pairs.csv");
  CHECK(loaded.data.size() == 3);
  CHECK(loaded.dropped_rows == 0);
  CHECK(loaded.warnings.empty());
  CHECK(loaded.data.rows[1].family_id == "f2");
  CHECK(loaded.data.rows[1].y2 == doctest::Approx(-0.5));
  CHECK(loaded.data.covariate_names == std::vector<std::string>{"cov_birth_order"});
}

TEST_CASE("a missing required column is named") {
  try {
    load_pair_csv(kFixtures + "/missing_y2.csv");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("\"y2\"") != std::string::npos);
  }
}

TEST_CASE("blank cells drop the row") {
  // fixture: 5 rows, row 3 has an empty y1
  const auto loaded = load_pair_csv(kFixtures + "/blank_y1.csv");
  CHECK(loaded.dropped_rows == 1);
  CHECK(loaded.data.size() == 4);
  REQUIRE(loaded.warnings.size() == 1);
  CHECK(loaded.warnings[0].find("dropped 1") != std::string::npos);
}

TEST_CASE("parse failures point at the cell") {
  std::istringstream in("family_id,t1,t2,y1,y2\na,1,0,2.5,3\nb,1,zero,1,1\n");
  try {
    read_pair_csv(in, "inline");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("inline:3") != std::string::npos);
    CHECK(msg.find("\"t2\"") != std::string::npos);
  }
  std::istringstream ragged("family_id,t1,t2,y1,y2\na,1,0,2.5\n");
  CHECK_THROWS_AS(read_pair_csv(ragged), ParseError);
  std::istringstream empty("family_id,t1,t2,y1,y2\n");
  CHECK_THROWS_AS(read_pair_csv(empty), EmptyDataError);
  CHECK_THROWS_AS(load_pair_csv(kFixtures + "/does_not_exist.csv"), IoError);
}

TEST_CASE("quoted fields and a byte-order mark") {
  std::istringstream in("\xEF\xBB\xBF" "family_id,t1,t2,y1,y2,note\n\"a,1\",1,0,2,3,\"he said \"\"hi\"\"\"\nb,0,1,NA,1,x\n");
  const auto loaded = read_pair_csv(in);
  CHECK(loaded.data.size() == 1);
  CHECK(loaded.data.rows[0].family_id == "a,1");
  CHECK(loaded.dropped_rows == 1);
}

TEST_CASE("simulated data survive a CSV round trip bit for bit") {
  auto config = preset_config("fig2c", ExposureMode::linear_gaussian);
  config.n_obs = 2000;
  config.master_seed = 12;
  const auto sample = simulate_sample(config, 0);
  std::stringstream buffer;
  write_pair_csv(sample, buffer);
  const auto back = read_pair_csv(buffer);
  REQUIRE(back.data.size() == sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    CHECK(back.data.rows[i].y1 == sample.rows[i].y1);
    CHECK(back.data.rows[i].t2 == sample.rows[i].t2);
  }
  const auto a = spillover_estimate(sample);
  const auto b = spillover_estimate(back.data);
  CHECK(a.sc.estimate == b.sc.estimate);
  CHECK(a.sc.se == b.sc.se);
}

TEST_CASE("estimate report JSON round trip") {
  auto config = preset_config("fig1a", ExposureMode::linear_gaussian);
  config.n_obs = 500;
  config.master_seed = 2;
  const auto report = spillover_estimate(simulate_sample(config, 0));
  const auto back = spillover_report_from_json(Json::parse(to_json(report).dump()));
  CHECK(back.sc.estimate == report.sc.estimate);
  CHECK(back.b1.ci_low == report.b1.ci_low);
  CHECK(back.b2.se == report.b2.se);
  CHECK(back.n == report.n);
  CHECK(back.df_residual == report.df_residual);
  CHECK_THROWS_AS(spillover_report_from_json(Json{{"n", 3}}), ParseError);

  std::ostringstream csv;
  write_estimate_csv({{"unadjusted", report}}, csv);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(first.rfind("unadjusted,b2,T2,", 0) == 0);
}
