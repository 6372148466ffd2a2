#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <gtest/gtest.h>
#include <json.hpp>

#include "triage/cli/commands.hpp"

using namespace triage::cli;
using json = nlohmann::json;
namespace fs = std::filesystem;
namespace net = boost::asio;
namespace http = boost::beast::http;
using tcp = net::ip::tcp;

namespace {

const std::string kData = TRIAGE_TEST_DATA;
const std::string kMinimal = kData + "/scenarios/minimal.yaml";

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(const std::vector<std::string>& args, const std::atomic<bool>* stop = nullptr) {
  static const std::atomic<bool> never{false};
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err, stop ? *stop : never);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("triage_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::uint16_t free_port() {
  net::io_context ioc;
  tcp::acceptor a(ioc, tcp::endpoint(net::ip::make_address("127.0.0.1"), 0));
  return a.local_endpoint().port();
}

std::optional<json> try_health(std::uint16_t port) {
  try {
    net::io_context ioc;
    tcp::socket s(ioc);
    s.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
    http::request<http::string_body> req{http::verb::get, "/health", 11};
    http::write(s, req);
    boost::beast::flat_buffer b;
    http::response<http::string_body> res;
    http::read(s, b, res);
    return json::parse(res.body());
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

TEST(CliRun, WritesArtifacts) {
  TempDir dir;
  const auto r = cli({"run", "--scenario", kMinimal, "--script", "auto", "--mode", "year2", "--out", dir / "o"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto metrics = json::parse(slurp(dir / "o/metrics.json"));
  EXPECT_EQ(metrics.at("scorecards_delivered"), 1);
  const auto cards = json::parse(slurp(dir / "o/scorecards.json"));
  ASSERT_EQ(cards.size(), 1u);
  EXPECT_EQ(cards[0].at("sources").at("respiration_bpm"), "lwir_rr");
  EXPECT_FALSE(slurp(dir / "o/events.log").empty());
}

TEST(CliRun, IdenticalInvocationsGiveIdenticalBytes) {
  TempDir dir;
  ASSERT_EQ(cli({"run", "--scenario", kMinimal, "--out", dir / "a"}).code, kOk);
  ASSERT_EQ(cli({"run", "--scenario", kMinimal, "--out", dir / "b"}).code, kOk);
  for (const char* f : {"scorecards.json", "metrics.json", "events.log"}) {
    EXPECT_EQ(slurp(dir / (std::string("a/") + f)), slurp(dir / (std::string("b/") + f))) << f;
  }
}

TEST(CliRun, ScenarioErrorsExitTwo) {
  TempDir dir;
  EXPECT_EQ(cli({"run", "--scenario", dir / "missing.yaml", "--out", dir / "o"}).code, kScenarioError);
  EXPECT_EQ(cli({"run", "--scenario", kMinimal, "--override", "sim.dtt=1", "--out", dir / "o"}).code, kScenarioError);
  EXPECT_EQ(cli({"run", "--scenario", kMinimal, "--override", "nonsense", "--out", dir / "o"}).code, kScenarioError);
  EXPECT_EQ(cli({"run", "--scenario", kMinimal, "--script", dir / "none.yaml", "--out", dir / "o"}).code,
            kScenarioError);
  EXPECT_FALSE(fs::exists(dir / "o"));
  EXPECT_EQ(cli({"run", "--scenario", kMinimal, "--mode", "year3"}).code, kUsage);
  EXPECT_EQ(cli({"bogus"}).code, kUsage);
}

TEST(CliRun, OverrideReachesEventLog) {
  TempDir dir;
  ASSERT_EQ(cli({"run", "--scenario", kMinimal, "--override", "sim.dt=0.05", "--out", dir / "o"}).code, kOk);
  std::istringstream log(slurp(dir / "o/events.log"));
  std::string first;
  std::getline(log, first);
  const auto start = json::parse(first);
  EXPECT_EQ(start.at("kind"), "start");
  EXPECT_DOUBLE_EQ(start.at("dt").get<double>(), 0.05);
}

TEST(CliRun, YearOneModeAndManualScript) {
  TempDir dir;
  std::ofstream(dir / "script.yaml") << "policy: manual\n"
                                        "commands:\n"
                                        "  - {t: 1, kind: dispatch, robot: ugv1, casualty: 0}\n"
                                        "  - {t: 60, kind: trigger, robot: ugv1}\n";
  const auto r = cli({"run", "--scenario", kMinimal, "--mode", "year1", "--script", dir / "script.yaml", "--out",
                      dir / "o"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto cards = json::parse(slurp(dir / "o/scorecards.json"));
  ASSERT_EQ(cards.size(), 1u);
  EXPECT_EQ(cards[0].at("sources").at("respiration_bpm"), "pcr_rr");
  EXPECT_EQ(cards[0].at("sources").at("heart_rate_bpm"), "mtts");
}

TEST(CliVitals, GoldenMmwaveTrace) {
  const auto r = cli({"vitals", "--trace", kData + "/golden/mmwave_hr75.csv", "--pipeline", "mmwave_hr"});
  ASSERT_EQ(r.code, kOk) << r.err;
  ASSERT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.at("valid").get<bool>());
  EXPECT_NEAR(j.at("bpm").get<double>(), 75.0, 2.0);
  EXPECT_TRUE(j.contains("quality"));
}

TEST(CliVitals, NoiseOnlyTraceIsInvalid) {
  for (const char* p : {"mmwave_hr", "mmwave_rr"}) {
    const auto r = cli({"vitals", "--trace", kData + "/golden/mmwave_noise.csv", "--pipeline", p});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_FALSE(json::parse(r.out).at("valid").get<bool>()) << p;
  }
}

TEST(CliVitals, ErrorsAndExitCodes) {
  const auto unknown = cli({"vitals", "--trace", kData + "/golden/mmwave_hr75.csv", "--pipeline", "ecg"});
  EXPECT_EQ(unknown.code, kUnknownPipeline);
  for (const auto& name : pipelines()) EXPECT_NE(unknown.err.find(name), std::string::npos) << name;

  TempDir dir;
  std::ofstream(dir / "bad.csv") << "modality=mmwave\n0,0.1\n0.05,zzz\n";
  EXPECT_EQ(cli({"vitals", "--trace", dir / "bad.csv", "--pipeline", "mmwave_hr"}).code, kTraceError);
  std::ofstream(dir / "nohdr.csv") << "0,0.1\n";
  EXPECT_EQ(cli({"vitals", "--trace", dir / "nohdr.csv", "--pipeline", "mmwave_hr"}).code, kTraceError);
  EXPECT_EQ(cli({"vitals", "--trace", dir / "absent.csv", "--pipeline", "mmwave_hr"}).code, kTraceError);
  EXPECT_EQ(cli({"vitals", "--trace", kData + "/golden/mmwave_hr75.csv", "--pipeline", "lwir_rr"}).code, kTraceError);

  // parses but too short for the estimator: reported, not a crash
  std::ofstream(dir / "short.csv") << "modality=mmwave\n0,0.1\n0.05,0.2\n0.1,0.1\n";
  const auto r = cli({"vitals", "--trace", dir / "short.csv", "--pipeline", "mmwave_hr"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_FALSE(json::parse(r.out).at("valid").get<bool>());
  EXPECT_TRUE(json::parse(r.out).contains("error"));
}

TEST(CliVitals, EveryPipelineOnItsModality) {
  TempDir dir;
  const std::vector<std::tuple<std::string, std::string, double>> cases{
      {"rppg_hr", "rgb", 90.0}, {"mmwave_rr", "mmwave", 18.0}, {"pcr_rr", "pcr", 18.0}, {"lwir_rr", "thermal", 18.0}};
  for (const auto& [pipeline, modality, expected] : cases) {
    const auto path = dir / (modality + ".csv");
    ASSERT_EQ(cli({"synth", "--modality", modality, "--hr", "90", "--rr", "18", "--snr", "20", "--out", path}).code,
              kOk);
    const auto r = cli({"vitals", "--trace", path, "--pipeline", pipeline});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j.at("valid").get<bool>()) << pipeline;
    EXPECT_NEAR(j.at("bpm").get<double>(), expected, 2.0) << pipeline;
  }
}

TEST(CliSynth, RegeneratesGoldenTracesExactly) {
  TempDir dir;
  ASSERT_EQ(cli({"synth", "--modality", "mmwave", "--hr", "75", "--rr", "15", "--snr", "20", "--seed", "1", "--out",
                 dir / "g.csv"})
                .code,
            kOk);
  EXPECT_EQ(slurp(dir / "g.csv"), slurp(kData + "/golden/mmwave_hr75.csv"));
  ASSERT_EQ(cli({"synth", "--modality", "mmwave", "--noise-only", "--seed", "1", "--out", dir / "n.csv"}).code, kOk);
  EXPECT_EQ(slurp(dir / "n.csv"), slurp(kData + "/golden/mmwave_noise.csv"));
  EXPECT_EQ(cli({"synth", "--modality", "rgb", "--noise-only"}).code, kUsage);
  EXPECT_EQ(cli({"synth", "--modality", "sonar"}).code, kUsage);
  EXPECT_EQ(cli({"synth", "--hr", "400", "--out", dir / "x.csv"}).code, kUsage);
}

TEST(CliServe, BusyPortExitsFive) {
  net::io_context ioc;
  tcp::acceptor busy(ioc, tcp::endpoint(net::ip::make_address("127.0.0.1"), 0));
  const auto port = std::to_string(busy.local_endpoint().port());
  const auto r = cli({"serve", "--scenario", kMinimal, "--port", port});
  EXPECT_EQ(r.code, kBindError);
  EXPECT_NE(r.err.find("bind"), std::string::npos);
  EXPECT_EQ(cli({"serve", "--scenario", "/nonexistent.yaml", "--port", "0"}).code, kScenarioError);
}

TEST(CliServe, ListensUntilStopped) {
  const auto port = free_port();
  std::atomic<bool> stop{false};
  Outcome r{};
  std::thread t([&] { r = cli({"serve", "--scenario", kMinimal, "--port", std::to_string(port), "--pace", "1"}, &stop); });
  std::optional<json> health;
  for (int i = 0; i < 100 && !health; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    health = try_health(port);
  }
  stop = true;
  t.join();
  ASSERT_TRUE(health.has_value());
  EXPECT_EQ(health->at("status"), "ok");
  EXPECT_EQ(health->at("simulation").at("scenario"), "minimal");
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("listening on 127.0.0.1:" + std::to_string(port)), std::string::npos);
}

TEST(CliServe, PaceTwoRunsAtTwiceWallRate) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = cli({"serve", "--scenario", kMinimal, "--port", "0", "--pace", "2", "--override", "sim.duration=1",
                      "--exit-on-finish"});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_GE(wall, 0.45);
  EXPECT_LT(wall, 0.9);
}
