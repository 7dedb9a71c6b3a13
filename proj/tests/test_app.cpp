#include <doctest.h>
#include <httplib.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include "hism/app/config.hpp"
#include "hism/app/pipeline.hpp"
#include "hism/app/service.hpp"
#include "hism/error.hpp"
#include "hism/gaze/gaze_io.hpp"
#include "hism/io.hpp"
#include "hism/sim/behavior.hpp"
#include "hism/sim/events.hpp"
#include "hism/sim/responses.hpp"
#include "hism/sim/session_io.hpp"

using namespace hism;
using namespace hism::app;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hism_test_app_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const auto out = fs::temp_directory_path() / "hism_test_app_cli.out";
  const std::string cmd = "env -u HISM_WORKDIR " + std::string(HISM_EXE) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = read_file(out);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

RunConfig small_config(const fs::path& workdir) {
  RunConfig c;
  c.workdir = workdir;
  c.seed = 3;
  c.sessions = 2;
  c.schedule.duration = 60;
  return c;
}

}  // namespace

TEST_CASE("run config json round trip and validation") {
  RunConfig c;
  c.seed = 9;
  c.sessions = 7;
  c.schedule.highlight_prob = 0.8;
  c.train.max_epochs = 3;
  c.split = {0.6, 0.2, 0.2};
  const auto back = run_config_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(back.seed == c.seed);
  CHECK(back.sessions == 7);
  CHECK(back.schedule == c.schedule);
  CHECK(back.train.max_epochs == 3);
  CHECK(back.split == c.split);
  CHECK(back.model == c.model);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"sessions":"many"})")), Error);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse("[1,2]")), Error);
  RunConfig bad;
  bad.split = {0.7, 0.3, 0.3};
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(RunConfig{}.require_seed(), Error);
}

TEST_CASE("session split is a seeded partition") {
  std::vector<std::string> ids;
  for (int i = 0; i < 40; ++i) ids.push_back(session_name(i));
  const auto s = split_sessions(ids, 1, {0.7, 0.15, 0.15});
  CHECK(s.train.size() == 28);
  CHECK(s.val.size() == 6);
  CHECK(s.test.size() == 6);
  std::set<std::string> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 40);
  const auto again = split_sessions(ids, 1, {0.7, 0.15, 0.15});
  CHECK(again.test == s.test);
  CHECK(split_sessions(ids, 2, {0.7, 0.15, 0.15}).test != s.test);
}

TEST_CASE("cli exit codes") {
  const auto missing = fs::temp_directory_path() / "hism_test_app_does_not_exist";
  fs::remove_all(missing);
  CHECK(run_cli("--workdir " + q(missing) + " --seed 1 simulate").code == 3);
  CHECK(run_cli("--seed 1 simulate").code == 2);

  const auto empty = fresh_dir("empty");
  CHECK(run_cli("--workdir " + q(empty) + " analyze").code == 4);
  CHECK(run_cli("--workdir " + q(empty) + " simulate").code == 2);  // no seed

  const auto cfg = empty / "bad.json";
  write_file(cfg, "{\"sessions\": -3}");
  CHECK(run_cli("--config " + q(cfg) + " --workdir " + q(empty) + " --seed 1 simulate").code == 2);
  write_file(cfg, "{not json");
  CHECK(run_cli("--config " + q(cfg) + " --workdir " + q(empty) + " --seed 1 simulate").code == 2);

  const auto work = fresh_dir("noweights");
  const auto sim = run_cli("--workdir " + q(work) + " --seed 4 --sessions 2 --duration 60 simulate");
  REQUIRE(sim.code == 0);
  const auto ev = run_cli("--workdir " + q(work) + " eval");
  CHECK(ev.code == 5);
  CHECK(ev.output.find("weights not found") != std::string::npos);
}

TEST_CASE("simulate is deterministic and records the highlight probability") {
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const std::string args = " --seed 11 --sessions 2 --duration 60 --highlight-prob 0.3 simulate";
  const auto ra = run_cli("--workdir " + q(a) + args);
  const auto rb = run_cli("--workdir " + q(b) + args);
  REQUIRE(ra.code == 0);
  CHECK(ra.output == rb.output);
  for (const auto& dir : list_sessions(a)) {
    const auto other = sessions_dir(b) / dir.filename();
    for (const char* f : {"session.json", "gaze.csv", "events.jsonl", "manifest.json"})
      CHECK(read_file(dir / f) == read_file(other / f));
    CHECK(nlohmann::json::parse(read_file(dir / "session.json"))["highlight_prob"] == 0.3);
  }
  CHECK(list_sessions(a).size() == 2);
}

TEST_CASE("analyze: one session is insufficient, corrupt gaze names the file") {
  const auto work = fresh_dir("analyze");
  auto cfg = small_config(work);
  cfg.sessions = 1;
  std::ostringstream log;
  cmd_simulate(cfg, log);
  const auto r = cmd_analyze(cfg, log);
  CHECK_FALSE(r.comparison_available);
  CHECK_FALSE(r.insufficient_reason.empty());
  CHECK_FALSE(r.metrics.empty());
  // Hit column against the keypresses in events.jsonl.
  const auto dir = list_sessions(work).front();
  std::set<int> pressed;
  for (const auto& e : sim::parse_events_jsonl(read_file(dir / "events.jsonl")))
    if (e.type == "keypress") pressed.insert(e.payload["cs_id"].get<int>());
  std::istringstream csv(read_file(work / "analysis" / "metrics.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.find(",hit,response_time_s") != std::string::npos);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    if (line.back() == ',') f.push_back("");
    REQUIRE(f.size() == 12);
    CHECK((f[10] == "1") == pressed.count(std::stoi(f[1])));
    CHECK(f[11].empty() == (f[10] == "0"));
    ++rows;
  }
  CHECK(rows == static_cast<int>(r.metrics.size()));

  const auto gaze = list_sessions(work).front() / "gaze.csv";
  write_file(gaze, "t_ms,x_px,y_px,valid\n0,1,2,1\n16,oops,2,1\n");
  try {
    cmd_analyze(cfg, log);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(std::string(e.what()).find("gaze.csv") != std::string::npos);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  const auto cli = run_cli("--workdir " + q(work) + " analyze");
  CHECK(cli.code == 3);
  CHECK(cli.output.find("gaze.csv") != std::string::npos);
}

TEST_CASE("groundtruth writes normalized saliency per session") {
  const auto work = fresh_dir("gt");
  const auto cfg = small_config(work);
  std::ostringstream log;
  cmd_simulate(cfg, log);
  cmd_groundtruth(cfg, log);
  for (const auto& dir : list_sessions(work)) {
    const auto s = saliency::read_saliency_csv(dir / "saliency.csv");
    CHECK(s.num_windows == 120);
    for (int w = 0; w < s.num_windows; ++w) {
      if (s.is_masked(w)) continue;
      double sum = 0;
      for (int e = 0; e < s.num_elements; ++e) sum += s.at(w, e);
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

namespace {

struct UploadBody {
  std::string events;
  std::string gaze;
  std::string json() const { return nlohmann::json{{"events_jsonl", events}, {"gaze_csv", gaze}}.dump(); }
};

UploadBody body_for(const std::string& script_json) {
  const auto script = sim::script_from_json(nlohmann::json::parse(script_json));
  const auto g = sim::simulate_gaze(script, sim::BehaviorParams{}, 5);
  const auto ev = sim::simulate_responses(script, g, 6);
  return {sim::format_events_jsonl(ev), gaze::format_gaze_csv(g)};
}

}  // namespace

TEST_CASE("service: new session, upload, duplicate, unknown, malformed") {
  const auto work = fresh_dir("service");
  auto cfg = small_config(work);
  SessionService svc(cfg);
  CHECK(svc.health().status == 200);

  const auto created = svc.new_session(42);
  REQUIRE(created.status == 200);
  const auto script = nlohmann::json::parse(created.body);
  const std::string id = script["session_id"];
  CHECK(id == "live_000000");
  CHECK(svc.new_session(42).body.find("live_000001") != std::string::npos);
  auto s42 = sim::schedule_session(cfg.schedule, scene::build_default_layout(), 42);
  s42.session_id = id;
  CHECK(sim::script_from_json(script) == s42);

  const auto body = body_for(created.body);
  auto bad = body;
  bad.events = bad.events.substr(0, bad.events.find('\n') + 1) + "{\"t\": oops}\n";
  const auto r400 = svc.upload(id, bad.json());
  CHECK(r400.status == 400);
  CHECK(r400.body.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(sessions_dir(work) / id));
  CHECK(svc.upload(id, "not json").status == 400);
  CHECK(svc.upload(id, R"({"events_jsonl": 1})").status == 400);

  const auto ok = svc.upload(id, body.json());
  CHECK(ok.status == 201);
  const auto stored = sim::read_session(sessions_dir(work) / id);
  CHECK(stored.script == s42);
  CHECK(svc.upload(id, body.json()).status == 409);
  CHECK(svc.upload("live_999999", body.json()).status == 404);
  CHECK(svc.upload("../etc", body.json()).status == 404);

  // A restarted service continues numbering after existing sessions.
  SessionService again(cfg);
  CHECK(nlohmann::json::parse(again.new_session(1).body)["session_id"] == "live_000002");

  // Uploaded sessions feed the offline pipeline.
  std::ostringstream log;
  cmd_groundtruth(cfg, log);
  CHECK(fs::exists(sessions_dir(work) / id / "saliency.csv"));
}

TEST_CASE("http server end to end on loopback") {
  const auto work = fresh_dir("http");
  auto cfg = small_config(work);
  const auto ui = work / "ui";
  fs::create_directories(ui);
  write_file(ui / "index.html", "<html>monitor</html>");
  cfg.ui_dir = ui;
  HttpServer server(cfg);
  const int port = server.bind(0, true);
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  for (int i = 0; i < 100 && !client.Get("/healthz"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

  const auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  const auto index = client.Get("/index.html");
  REQUIRE(index);
  CHECK(index->body == "<html>monitor</html>");
  CHECK(client.Get("/api/session/new?seed=abc")->status == 400);
  const auto created = client.Get("/api/session/new?seed=7");
  REQUIRE(created);
  CHECK(created->status == 200);
  const std::string id = nlohmann::json::parse(created->body)["session_id"];
  const auto body = body_for(created->body);
  const auto up = client.Post("/api/log/" + id, body.json(), "application/json");
  REQUIRE(up);
  CHECK(up->status == 201);
  CHECK(client.Post("/api/log/" + id, body.json(), "application/json")->status == 409);
  CHECK(client.Post("/api/log/live_123456", body.json(), "application/json")->status == 404);

  server.stop();
  t.join();
}

TEST_CASE("placeholder page without a ui bundle") {
  const auto work = fresh_dir("placeholder");
  HttpServer server(small_config(work));
  const int port = server.bind(0, true);
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  httplib::Result res;
  for (int i = 0; i < 100 && !(res = client.Get("/")); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type").find("text/html") != std::string::npos);
  server.stop();
  t.join();
}
