#include "hism/app/service.hpp"

#include <httplib.h>

#include <cstdio>
#include <regex>

#include "hism/app/pipeline.hpp"
#include "hism/error.hpp"
#include "hism/gaze/gaze_io.hpp"
#include "hism/io.hpp"
#include "hism/sim/events.hpp"
#include "hism/sim/session_io.hpp"

namespace fs = std::filesystem;

namespace hism::app {

namespace {

const std::regex kLiveId("live_([0-9]{6})");

ServiceResponse json_response(int status, const nlohmann::ordered_json& j) {
  return {status, j.dump() + "\n", "application/json"};
}

ServiceResponse error_response(int status, const std::string& message) {
  return json_response(status, {{"error", message}});
}

const char* kPlaceholderPage =
    "<!doctype html><html><head><title>drone monitor</title></head>"
    "<body><p>No UI bundle configured. Start the service with --ui-dir pointing at the built monitor UI.</p>"
    "</body></html>\n";

}  // namespace

SessionService::SessionService(RunConfig cfg) : cfg_(std::move(cfg)) {
  fs::create_directories(cfg_.workdir / "pending");
  fs::create_directories(sessions_dir(cfg_.workdir));
  for (const fs::path& dir : {cfg_.workdir / "pending", sessions_dir(cfg_.workdir)})
    for (const auto& e : fs::directory_iterator(dir)) {
      std::smatch m;
      const std::string name = e.path().stem().string();
      if (std::regex_match(name, m, kLiveId)) next_index_ = std::max(next_index_, std::stoi(m[1]) + 1);
    }
}

std::mutex& SessionService::session_mutex(const std::string& id) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

ServiceResponse SessionService::new_session(std::optional<std::uint64_t> seed) {
  int index;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    index = next_index_++;
  }
  char id[32];
  std::snprintf(id, sizeof id, "live_%06d", index);
  const std::uint64_t s = seed.value_or(static_cast<std::uint64_t>(index));
  sim::SessionScript script = sim::schedule_session(cfg_.schedule, scene::build_default_layout(), s);
  script.session_id = id;
  const auto j = sim::to_json(script);
  write_file_atomic(cfg_.workdir / "pending" / (std::string(id) + ".json"), j.dump(1) + "\n");
  return json_response(200, j);
}

ServiceResponse SessionService::upload(const std::string& id, const std::string& body) {
  if (!std::regex_match(id, kLiveId)) return error_response(404, "unknown session " + id);
  std::lock_guard<std::mutex> lock(session_mutex(id));
  const fs::path final_dir = sessions_dir(cfg_.workdir) / id;
  const fs::path pending = cfg_.workdir / "pending" / (id + ".json");
  if (fs::exists(final_dir)) return error_response(409, "session " + id + " already uploaded");
  if (!fs::exists(pending)) return error_response(404, "unknown session " + id);

  nlohmann::json payload;
  try {
    payload = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, std::string("body is not JSON: ") + e.what());
  }
  if (!payload.is_object() || !payload.contains("events_jsonl") || !payload["events_jsonl"].is_string() ||
      !payload.contains("gaze_csv") || !payload["gaze_csv"].is_string())
    return error_response(400, "body needs string fields events_jsonl and gaze_csv");
  sim::EventLog events;
  std::vector<gaze::GazeSample> samples;
  try {
    events = sim::parse_events_jsonl(payload["events_jsonl"].get<std::string>());
  } catch (const Error& e) {
    return error_response(400, "events_jsonl: " + e.message());
  }
  try {
    samples = gaze::parse_gaze_csv(payload["gaze_csv"].get<std::string>());
  } catch (const Error& e) {
    return error_response(400, "gaze_csv: " + e.message());
  }

  const sim::SessionScript script = sim::script_from_json(nlohmann::json::parse(read_file(pending)));
  fs::path tmp = final_dir;
  tmp += ".partial";
  try {
    fs::remove_all(tmp);
    sim::write_session(tmp, script, samples, events, false);
    fs::rename(tmp, final_dir);
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    return error_response(500, std::string("could not persist session: ") + e.what());
  }
  fs::remove(pending);
  return json_response(201, {{"session_id", id}, {"events", events.size()}, {"gaze_samples", samples.size()}});
}

ServiceResponse SessionService::health() const { return json_response(200, {{"status", "ok"}}); }

struct HttpServer::Impl {
  SessionService service;
  httplib::Server server;

  explicit Impl(const RunConfig& cfg) : service(cfg) {
    auto reply = [](httplib::Response& res, const ServiceResponse& r) {
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server.Get("/healthz", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, service.health());
    });
    server.Get("/api/session/new", [this, reply](const httplib::Request& req, httplib::Response& res) {
      std::optional<std::uint64_t> seed;
      if (req.has_param("seed")) {
        const std::string s = req.get_param_value("seed");
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
          return reply(res, error_response(400, "seed must be a non-negative integer"));
        try {
          seed = std::stoull(s);
        } catch (const std::exception&) {
          return reply(res, error_response(400, "seed out of range"));
        }
      }
      reply(res, service.new_session(seed));
    });
    server.Post(R"(/api/log/([A-Za-z0-9_]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.upload(req.matches[1], req.body));
    });
    if (!cfg.ui_dir.empty() && fs::is_directory(cfg.ui_dir)) {
      server.set_mount_point("/", cfg.ui_dir.string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kPlaceholderPage, "text/html");
      });
    }
  }
};

HttpServer::HttpServer(const RunConfig& cfg) : impl_(std::make_unique<Impl>(cfg)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(int port, bool loopback_only) {
  const char* host = loopback_only ? "127.0.0.1" : "0.0.0.0";
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorCode::io_failure, "cannot bind port " + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void cmd_serve(const RunConfig& cfg, std::ostream& log) {
  if (cfg.workdir.empty()) throw CommandError(exit_code::config, "no workdir given (--workdir or HISM_WORKDIR)");
  if (!fs::is_directory(cfg.workdir)) throw CommandError(exit_code::io, "workdir does not exist: " + cfg.workdir.string());
  HttpServer server(cfg);
  const int port = server.bind(cfg.port);
  log << "serving on port " << port << "\n";
  log.flush();
  server.listen();
}

}  // namespace hism::app
