#include <stdexcept>

#include <gtest/gtest.h>

#include "triage/orchestrator/orchestrator.hpp"

using namespace triage::orchestrator;
using triage::geoloc::CasualtyMap;
using triage::meshsync::Store;
using triage::vitals::RateEstimate;

namespace {

RateEstimate valid(double bpm, const char* src) { return {bpm, 0.6, true, src}; }
RateEstimate bad(const char* src) { return RateEstimate::invalid(src, 0.05); }

PluginConfig rate_plugin(const std::string& name, RateEstimate rr, std::optional<RateEstimate> hr = std::nullopt,
                         double elapsed = 12.0) {
  PluginConfig c;
  c.descriptor.name = name;
  c.descriptor.produces = {field::kRespiration};
  if (hr) c.descriptor.produces.push_back(field::kHeartRate);
  c.run = [=](const AssessmentRequest&) {
    PluginOutput out;
    out.values[field::kRespiration] = rr;
    if (hr) out.values[field::kHeartRate] = *hr;
    out.elapsed = elapsed;
    return out;
  };
  return c;
}

PluginConfig flag_plugin(const std::string& name, const std::vector<std::string>& fields, bool value,
                         double elapsed = 5.0) {
  PluginConfig c;
  c.descriptor.name = name;
  c.descriptor.produces = fields;
  c.run = [=](const AssessmentRequest&) {
    PluginOutput out;
    for (const auto& f : fields) out.values[f] = value;
    out.elapsed = elapsed;
    return out;
  };
  return c;
}

CasualtyMap map_with(int n) {
  CasualtyMap m;
  for (int i = 0; i < n; ++i) m.cluster_update(Eigen::Vector3d(10.0 * i, 0, 0), 1.0);
  return m;
}

PluginConfig disabled(PluginConfig c) {
  c.descriptor.enabled = false;
  return c;
}

}  // namespace

TEST(Registry, EnabledSubset) {
  const auto reg = Registry::configure({rate_plugin("lwir_rr", valid(14, "lwir")),
                                        rate_plugin("mmwave", valid(18, "mmwave"), valid(70, "mmwave")),
                                        disabled(rate_plugin("pcr_rr", valid(12, "pcr")))});
  EXPECT_EQ(reg.size(), 2u);
  EXPECT_TRUE(reg.contains("lwir_rr"));
  EXPECT_FALSE(reg.contains("pcr_rr"));
}

TEST(Registry, AllDisabledGivesEmptyScorecard) {
  Orchestrator orch({disabled(rate_plugin("lwir_rr", valid(14, "lwir"))),
                     disabled(flag_plugin("trauma", {field::kTraumaHead}, true))},
                    Mode::Year2);
  EXPECT_TRUE(orch.registry().empty());
  const auto map = map_with(1);
  Store store("ugv1");
  const auto pending = orch.start({0, 100.0, "ugv1"}, map);
  EXPECT_TRUE(pending.results.empty());
  const auto card = orch.build_scorecard(pending, map, false, store);
  EXPECT_EQ(card.populated(), 0u);
  EXPECT_TRUE(card.sources.empty());
  EXPECT_EQ(card.casualty_id, 0);
  EXPECT_DOUBLE_EQ(card.assessed_at, 100.0);
}

TEST(Registry, Errors) {
  EXPECT_THROW(Registry::configure({rate_plugin("a", bad("x")), disabled(rate_plugin("a", bad("x")))}),
               DuplicatePlugin);
  auto zero = rate_plugin("b", bad("x"));
  zero.descriptor.timeout = 0.0;
  EXPECT_THROW(Registry::configure({zero}), OrchestratorError);
  PluginConfig none;
  none.descriptor.name = "c";
  EXPECT_THROW(Registry::configure({none}), OrchestratorError);
}

TEST(RunAssessment, AllComplete) {
  const auto reg = Registry::configure({rate_plugin("lwir_rr", valid(14, "lwir")),
                                        rate_plugin("mmwave", valid(18, "mmwave"), valid(70, "mmwave")),
                                        flag_plugin("trauma", {field::kTraumaHead}, true)});
  const auto res = run_assessment({0, 0.0, "ugv1"}, reg, map_with(1));
  ASSERT_EQ(res.size(), 3u);
  for (const auto& r : res) EXPECT_TRUE(r.completed) << r.plugin;
  EXPECT_EQ(res[0].plugin, "lwir_rr");
  EXPECT_EQ(res[2].plugin, "trauma");
}

TEST(RunAssessment, TimeoutIsolated) {
  auto slow = flag_plugin("alertness", {field::kAlertMotor}, true, 45.0);
  const auto reg = Registry::configure({rate_plugin("lwir_rr", valid(14, "lwir")), slow});
  const auto res = run_assessment({0, 0.0, "ugv1"}, reg, map_with(1));
  ASSERT_EQ(res.size(), 2u);
  EXPECT_TRUE(res[0].completed);
  EXPECT_EQ(res[0].values.size(), 1u);
  EXPECT_FALSE(res[1].completed);
  EXPECT_TRUE(res[1].values.empty());
  EXPECT_DOUBLE_EQ(res[1].elapsed, kDefaultTimeout);
  EXPECT_DOUBLE_EQ(assessment_duration(res), kDefaultTimeout);
}

TEST(RunAssessment, EmptyRegistryAndUnknownCasualty) {
  const auto reg = Registry::configure({});
  EXPECT_TRUE(run_assessment({0, 0.0, ""}, reg, map_with(1)).empty());
  EXPECT_THROW(run_assessment({3, 0.0, ""}, reg, map_with(1)), UnknownCasualty);
}

TEST(RunAssessment, ThrowingPluginAndUndeclaredFields) {
  PluginConfig boom;
  boom.descriptor.name = "boom";
  boom.descriptor.produces = {field::kTraumaHead};
  boom.run = [](const AssessmentRequest&) -> PluginOutput { throw std::runtime_error("sensor offline"); };
  auto sneaky = flag_plugin("trauma", {field::kTraumaHead}, true);
  sneaky.descriptor.produces = {field::kTraumaTorso};
  const auto res = run_assessment({0, 0.0, ""}, Registry::configure({boom, sneaky}), map_with(1));
  EXPECT_FALSE(res[0].completed);
  EXPECT_EQ(res[0].error, "sensor offline");
  EXPECT_TRUE(res[1].completed);
  EXPECT_TRUE(res[1].values.empty());
}

// Every validity combination of each rule, with the expected source.
TEST(Fusion, TruthTables) {
  struct Row {
    bool primary, fallback;
    const char* expect;
  };
  const Row rows[] = {{true, true, "primary"}, {true, false, "primary"}, {false, true, "fallback"},
                      {false, false, nullptr}};
  for (const auto& row : rows) {
    const RateEstimate lwir = row.primary ? valid(14, "lwir") : bad("lwir");
    const RateEstimate mm = row.fallback ? valid(18, "mmwave") : bad("mmwave");
    const auto y2 = fuse_respiration_y2(lwir, mm);
    const RateEstimate pcr = row.primary ? valid(12, "pcr") : bad("pcr");
    const RateEstimate mtts = row.fallback ? valid(16, "mtts") : bad("mtts");
    const auto y1 = fuse_respiration_y1(pcr, mtts);
    if (row.expect == nullptr) {
      EXPECT_FALSE(y2.valid);
      EXPECT_FALSE(y1.valid);
    } else if (std::string(row.expect) == "primary") {
      EXPECT_EQ(y2.source, "lwir");
      EXPECT_DOUBLE_EQ(y2.bpm, 14);
      EXPECT_EQ(y1.source, "pcr");
      EXPECT_DOUBLE_EQ(y1.bpm, 12);
    } else {
      EXPECT_EQ(y2.source, "mmwave");
      EXPECT_DOUBLE_EQ(y2.bpm, 18);
      EXPECT_EQ(y1.source, "mtts");
      EXPECT_DOUBLE_EQ(y1.bpm, 16);
    }
  }
}

TEST(Fusion, ModeSelectsPlugins) {
  const std::vector<PluginResult> res{
      {"lwir_rr", {{field::kRespiration, valid(14, "lwir")}}, true, 12, ""},
      {"mmwave", {{field::kRespiration, valid(18, "mmwave")}, {field::kHeartRate, valid(71, "mmwave")}}, true, 12, ""},
      {"pcr_rr", {{field::kRespiration, valid(12, "pcr")}}, true, 12, ""},
      {"mtts", {{field::kRespiration, valid(16, "mtts")}, {field::kHeartRate, valid(80, "mtts")}}, true, 12, ""},
  };
  const auto y2 = fuse_vitals(res, Mode::Year2);
  EXPECT_EQ(y2.respiration.source, "lwir_rr");
  EXPECT_EQ(y2.heart_rate.source, "mmwave");
  EXPECT_DOUBLE_EQ(y2.heart_rate.bpm, 71);
  const auto y1 = fuse_vitals(res, Mode::Year1);
  EXPECT_EQ(y1.respiration.source, "pcr_rr");
  EXPECT_EQ(y1.heart_rate.source, "mtts");

  // an incomplete result is never consumed
  auto cut = res;
  cut[0].completed = false;
  EXPECT_EQ(fuse_vitals(cut, Mode::Year2).respiration.source, "mmwave");
}

TEST(Fusion, ModeNames) {
  EXPECT_EQ(mode_from_string("year1"), Mode::Year1);
  EXPECT_EQ(mode_from_string(to_string(Mode::Year2)), Mode::Year2);
  EXPECT_THROW(mode_from_string("year3"), OrchestratorError);
}

TEST(Orchestrator, TogglingLwirFallsBackToMmwave) {
  Orchestrator orch({rate_plugin("lwir_rr", valid(14, "lwir")),
                     rate_plugin("mmwave", valid(18, "mmwave"), valid(70, "mmwave"))},
                    Mode::Year2);
  const auto map = map_with(1);
  Store store("ugv1");
  EXPECT_EQ(orch.build_scorecard(orch.start({0, 0, "ugv1"}, map), map, false, store).sources.at(field::kRespiration),
            "lwir_rr");
  orch.set_enabled("lwir_rr", false);
  const auto card = orch.build_scorecard(orch.start({0, 0, "ugv1"}, map), map, false, store);
  EXPECT_EQ(card.sources.at(field::kRespiration), "mmwave");
  EXPECT_DOUBLE_EQ(*card.respiration_bpm, 18);
  EXPECT_THROW(orch.set_enabled("nope", true), UnknownPlugin);
}

TEST(Scorecard, ThreeFieldsThreeSources) {
  FusedVitals v{valid(72, "mmwave"), valid(14, "lwir_rr")};
  const auto card = make_scorecard(0, map_with(1), v, {{field::kTraumaHead, true, "trauma"}}, {}, {50.0, "ugv1"});
  EXPECT_EQ(card.populated(), 3u);
  EXPECT_EQ(card.sources.size(), 3u);
  EXPECT_EQ(card.sources.at(field::kTraumaHead), "trauma");
  EXPECT_EQ(card.trauma.head, true);
  EXPECT_FALSE(card.trauma.torso.has_value());
}

TEST(Scorecard, ManikinRule) {
  FusedVitals v{valid(72, "mmwave"), valid(14, "lwir_rr")};
  const auto card = make_scorecard(0, map_with(1), v, {}, {}, {50.0, "ugv1", true});
  EXPECT_DOUBLE_EQ(*card.heart_rate_bpm, 0.0);
  EXPECT_EQ(card.sources.at(field::kHeartRate), "manikin_rule");
  ASSERT_TRUE(card.description.has_value());
  EXPECT_NE(card.description->find("manikin"), std::string::npos);
}

TEST(Scorecard, NoResultsOnlyIdentity) {
  const auto card = make_scorecard(2, map_with(3), {}, {}, {}, {7.5, "ugv2"});
  EXPECT_EQ(card.populated(), 0u);
  EXPECT_EQ(card.casualty_id, 2);
  EXPECT_DOUBLE_EQ(card.assessed_at, 7.5);
  EXPECT_THROW(make_scorecard(5, map_with(3), {}, {}, {}, {}), UnknownCasualty);
}

TEST(Scorecard, JsonRoundTripIsCanonical) {
  FusedVitals v{valid(72.123, "mmwave"), valid(14, "lwir_rr")};
  const auto card = make_scorecard(0, map_with(1), v,
                                   {{field::kTraumaHead, true, "trauma"}, {field::kAlertMotor, false, "alertness"}},
                                   {{"trauma", "laceration on the forehead"}}, {50.25, "ugv1"});
  const std::string text = canonical_json(card);
  EXPECT_EQ(text.rfind("{\"alertness\":", 0), 0u);
  const auto back = scorecard_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back, card);
  EXPECT_EQ(canonical_json(back), text);
  EXPECT_DOUBLE_EQ(*card.heart_rate_bpm, 72.12);
}

// For every subset of enabled plugins, no provenance entry names a disabled
// plugin.
TEST(Properties, DisabledPluginsNeverContribute) {
  const std::vector<PluginConfig> all{
      rate_plugin("lwir_rr", valid(14, "lwir")),
      rate_plugin("mmwave", valid(18, "mmwave"), valid(70, "mmwave")),
      rate_plugin("pcr_rr", valid(12, "pcr")),
      rate_plugin("mtts", valid(16, "mtts"), valid(75, "mtts")),
      flag_plugin("trauma", {field::kTraumaHead, field::kTraumaTorso, field::kSevereHemorrhage}, true),
      flag_plugin("respiratory_distress", {field::kRespiratoryDistress}, false),
      flag_plugin("alertness", {field::kAlertOcular, field::kAlertVerbal, field::kAlertMotor}, true),
  };
  const auto map = map_with(1);
  for (unsigned mask = 0; mask < (1u << all.size()); ++mask) {
    std::vector<PluginConfig> cfg = all;
    std::set<std::string> off;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      cfg[i].descriptor.enabled = (mask >> i) & 1u;
      if (!cfg[i].descriptor.enabled) off.insert(cfg[i].descriptor.name);
    }
    for (Mode mode : {Mode::Year1, Mode::Year2}) {
      Orchestrator orch(cfg, mode);
      Store store("ugv1");
      const auto card = orch.build_scorecard(orch.start({0, 0, "ugv1"}, map), map, false, store);
      for (const auto& [key, plugin] : card.sources) {
        EXPECT_EQ(off.count(plugin), 0u) << "mask " << mask << " field " << key;
      }
      EXPECT_EQ(card.sources.size(), card.populated());
    }
  }
}

TEST(Properties, HangingPluginDelaysByAtMostItsTimeout) {
  for (double hang : {21.0, 100.0, 1e9}) {
    auto slow = flag_plugin("alertness", {field::kAlertMotor}, true, hang);
    slow.descriptor.timeout = 8.0;
    Orchestrator orch({rate_plugin("lwir_rr", valid(14, "lwir"), std::nullopt, 6.0), slow}, Mode::Year2);
    const auto p = orch.start({0, 30.0, "ugv1"}, map_with(1));
    EXPECT_LE(p.completes_at - 30.0, 8.0);
  }
}

TEST(Properties, EachBuildWritesOneScorecardRecord) {
  Orchestrator orch({rate_plugin("lwir_rr", valid(14, "lwir"))}, Mode::Year2);
  const auto map = map_with(4);
  Store store("ugv1");
  store.put_local("robot_pose", "p", 0);
  for (int i = 0; i < 12; ++i) {
    const std::size_t before = store.stream_records(kScorecardStream).size();
    const auto card = orch.build_scorecard(orch.start({i % 4, double(i), "ugv1"}, map), map, i % 3 == 0, store);
    const auto recs = store.stream_records(kScorecardStream);
    ASSERT_EQ(recs.size(), before + 1);
    EXPECT_EQ(recs.back()->payload, canonical_json(card));
  }
  EXPECT_EQ(store.size(), 13u);
}
