#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "gswcast/error.hpp"
#include "gswcast/sample_io.hpp"
#include "gswcast/synth.hpp"

using namespace gswcast;

TEST(SampleIo, RoundTripIsBitExact) {
  SynthConfig cfg;
  cfg.entities = 500;
  cfg.timestamps = 5;
  const auto data = synth_table(cfg);
  const auto w = data.table.measure("m0");
  const auto s = gsw_draw(data.table, w, 3.0, 21, WeightSource::group("g0", WeightSource::Kind::GeoMean, {"m0", "m1"}));

  std::ostringstream out;
  write_sample(out, s);
  std::istringstream in(out.str());
  const auto back = read_sample(in);

  EXPECT_EQ(back.delta, s.delta);
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.source, s.source);
  EXPECT_EQ(back.next_row_id, s.next_row_id);
  EXPECT_EQ(back.row_id, s.row_id);
  EXPECT_EQ(back.u, s.u);
  EXPECT_EQ(back.weight, s.weight);
  EXPECT_EQ(back.key, s.key);
  EXPECT_TRUE(back.rows.same_schema(s.rows));

  std::ostringstream again;
  write_sample(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(SampleIo, HeaderIsSelfDescribing) {
  const auto t = gswcast::testing::ad_table();
  const auto w = t.measure("Impression");
  std::ostringstream out;
  write_sample(out, gsw_draw(t, w, 0.0, 1, WeightSource::single("Impression")));
  const auto text = out.str();
  ASSERT_EQ(text.rfind("# {", 0), 0u);
  EXPECT_NE(text.find("\"delta\""), std::string::npos);
  EXPECT_NE(text.find("\"weight_source\""), std::string::npos);
  const auto second = text.substr(text.find('\n') + 1);
  EXPECT_EQ(second.rfind("row_id,u,w,Age,Gender,Location,Impression,ViewTime,ts\n", 0), 0u);
}

TEST(SampleIo, FileRoundTrip) {
  const auto t = gswcast::testing::ad_table();
  const auto w = t.measure("ViewTime");
  const auto s = gsw_draw(t, w, 1.0, 5, WeightSource::single("ViewTime"));
  const auto path = std::filesystem::temp_directory_path() / "gswcast_sample_io_test.sample";
  save_sample(path, s);
  const auto back = load_sample(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.row_id, s.row_id);
  EXPECT_EQ(back.u, s.u);
}

TEST(SampleIo, MalformedInput) {
  std::istringstream empty("");
  EXPECT_THROW(read_sample(empty), Error);
  std::istringstream bad("# {not json\n");
  EXPECT_THROW(read_sample(bad), Error);
  EXPECT_THROW(load_sample("/nonexistent/dir/x.sample"), Error);
}
