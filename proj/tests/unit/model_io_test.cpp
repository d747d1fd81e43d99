#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "hasa/domains.hpp"
#include "hasa/model_io.hpp"
#include "support/random_models.hpp"
#include "support/small_models.hpp"

using namespace hasa;
using nlohmann::json;

namespace {

void expect_same(const HasaMdp& a, const HasaMdp& b) {
  const ModelSpec x = a.to_spec();
  const ModelSpec y = b.to_spec();
  EXPECT_EQ(x.states, y.states);
  EXPECT_EQ(x.actions, y.actions);
  EXPECT_EQ(x.non_policy_action, y.non_policy_action);
  EXPECT_EQ(x.transition, y.transition);
  EXPECT_EQ(x.reward, y.reward);
  EXPECT_EQ(x.discount, y.discount);
  EXPECT_EQ(x.initial_dist, y.initial_dist);
  EXPECT_EQ(x.classification, y.classification);
  EXPECT_EQ(x.patience, y.patience);
  EXPECT_EQ(a.uncertainty(), b.uncertainty());
}

std::string expect_parse_error(const std::string& doc) {
  try {
    parse_model(doc);
  } catch (const ParseError& e) {
    return e.path();
  }
  ADD_FAILURE() << "no ParseError";
  return {};
}

}  // namespace

TEST(ModelIo, RandomModelsRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const HasaMdp m = fixtures::random_model(rng);
    expect_same(m, parse_model(serialize_model(m)));
  }
}

TEST(ModelIo, DomainsRoundTrip) {
  GridworldConfig g;
  g.width = 3;
  g.height = 2;
  g.rnr = 2.0;
  const HasaMdp grid = make_gridworld(g);
  expect_same(grid, parse_model(serialize_model(grid)));
  const HasaMdp wh = make_warehouse({});
  expect_same(wh, parse_model(serialize_model(wh)));
}

TEST(ModelIo, SerializationIsStable) {
  const HasaMdp m = fixtures::identity_model(3, 2, 0.9);
  EXPECT_EQ(serialize_model(m), serialize_model(parse_model(serialize_model(m))));
}

TEST(ModelIo, MissingDiscountNamesTheField) {
  json doc = json::parse(serialize_model(fixtures::identity_model(2, 2, 0.5)));
  doc.erase("discount");
  EXPECT_EQ(expect_parse_error(doc.dump()), "discount");
}

TEST(ModelIo, BadEntryNamesItsPath) {
  json doc = json::parse(serialize_model(fixtures::identity_model(2, 2, 0.5)));
  doc["transition"][1][0][1] = "x";
  EXPECT_EQ(expect_parse_error(doc.dump()), "transition[1][0][1]");

  doc = json::parse(serialize_model(fixtures::identity_model(2, 2, 0.5)));
  doc["reward"][0] = json::array({1.0});
  EXPECT_EQ(expect_parse_error(doc.dump()), "reward[0]");

  doc = json::parse(serialize_model(fixtures::identity_model(2, 2, 0.5)));
  doc["uncertainty_events"][0]["best"] = "ghost";
  EXPECT_EQ(expect_parse_error(doc.dump()), "uncertainty_events[0].best");
}

TEST(ModelIo, SyntaxErrorCarriesPosition) {
  try {
    parse_model("{\"states\": [\n 1,,]");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_TRUE(e.path().empty());
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, VersionMismatch) {
  json doc = json::parse(serialize_model(fixtures::identity_model(2, 2, 0.5)));
  doc["schema_version"] = kSchemaVersion + 1;
  EXPECT_THROW(parse_model(doc.dump()), VersionError);
}

TEST(ModelIo, DiscountOneParsesButFailsValidation) {
  json doc = json::parse(serialize_model(fixtures::identity_model(2, 2, 0.5)));
  doc["discount"] = 1.0;
  const HasaMdp m = parse_model(doc.dump());
  EXPECT_FALSE(validate_model(m).ok());
}

TEST(ModelIo, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "hasa_model_io_test.json";
  const HasaMdp m = fixtures::identity_model(3, 3, 0.8);
  save_model(m, path);
  expect_same(m, load_model(path));
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), Error);
}

TEST(ModelIo, PolicyRoundTrip) {
  const HasaMdp m = fixtures::identity_model(3, 2, 0.8);
  const DeterministicPolicy p({1, 0, 1});
  EXPECT_EQ(policy_from_json(m, policy_to_json(m, p)), p);
  EXPECT_EQ(policy_from_json(m, R"({"value": 3, "policy": {"s0": "a1", "s1": "a0", "s2": "a1"}})"), p);
}

TEST(ModelIo, PolicyMayNotUseTheNonPolicyAction) {
  const HasaMdp m = fixtures::identity_model(2, 2, 0.8);
  EXPECT_THROW(policy_from_json(m, R"({"s0": "wait", "s1": "a0"})"), ParseError);
  EXPECT_THROW(policy_from_json(m, R"({"s0": "a0"})"), ParseError);
}
