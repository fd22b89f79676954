#include "railrecover/service.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>

#include "httplib.h"

#include "json_read.hpp"
#include "railrecover/pipeline.hpp"

namespace railrecover {

namespace fs = std::filesystem;
using namespace jsonread;

const char* to_string(JobState state) {
  switch (state) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
    case JobState::Cancelled: return "cancelled";
  }
  return "failed";
}

namespace {

std::optional<JobState> parse_state(const std::string& s) {
  for (JobState st : {JobState::Queued, JobState::Running, JobState::Done, JobState::Failed, JobState::Cancelled}) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

bool final_state(JobState s) { return s == JobState::Done || s == JobState::Failed || s == JobState::Cancelled; }

Json progress_json(const Progress& p) {
  Json j;
  j["nodes"] = p.nodes;
  j["primal"] = p.primal ? Json(*p.primal) : Json(nullptr);
  j["dual_bound"] = p.dual_bound;
  j["gap"] = p.gap;
  j["elapsed"] = p.elapsed;
  return j;
}

Progress progress_from_json(const Json& j) {
  Progress p;
  p.nodes = j.at("nodes").get<std::int64_t>();
  if (!j.at("primal").is_null()) p.primal = j.at("primal").get<double>();
  p.dual_bound = j.at("dual_bound").get<double>();
  p.gap = j.at("gap").get<double>();
  p.elapsed = j.at("elapsed").get<double>();
  return p;
}

Json error_json(const std::string& message, const std::string& path = {}) {
  Json j{{"error", message}};
  if (!path.empty()) j["path"] = path;
  return j;
}

std::map<std::string, double> weight_map(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) out[k] = as_number(v, child(path, k));
  return out;
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (const char* v = std::getenv("RAILRECOVER_LISTEN"); v != nullptr && *v != '\0') {
    const std::string s(v);
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) {
      c.host = s;
    } else {
      if (colon > 0) c.host = s.substr(0, colon);
      c.port = std::stoi(s.substr(colon + 1));
    }
  }
  if (const char* v = std::getenv("RAILRECOVER_STORE"); v != nullptr && *v != '\0') c.store = v;
  if (const char* v = std::getenv("RAILRECOVER_WORKERS"); v != nullptr && *v != '\0') c.workers = std::max(1, std::atoi(v));
  if (const char* v = std::getenv("RAILRECOVER_TIME_LIMIT"); v != nullptr && *v != '\0') c.default_time_limit = std::atof(v);
  return c;
}

Overrides parse_overrides(const Json& j) {
  const std::string path = "/overrides";
  Overrides o;
  if (j.is_null()) return o;
  expect_object(j, path, {"weights", "penalties", "max_delay", "turn_stations", "blockage"});
  optional_field(j, "weights", path, [&](const Json& v, const std::string& vp) {
    expect_object(v, vp, {"default", "trips", "lines"});
    optional_field(v, "default", vp, [&](const Json& x, const std::string& xp) { o.default_weight = as_number(x, xp); });
    optional_field(v, "trips", vp, [&](const Json& x, const std::string& xp) { o.trip_weights = weight_map(x, xp); });
    optional_field(v, "lines", vp, [&](const Json& x, const std::string& xp) { o.line_weights = weight_map(x, xp); });
  });
  optional_field(j, "penalties", path, [&](const Json& v, const std::string& vp) {
    expect_object(v, vp, {"turn", "return"});
    optional_field(v, "turn", vp, [&](const Json& x, const std::string& xp) { o.turn_penalty = as_number(x, xp); });
    optional_field(v, "return", vp, [&](const Json& x, const std::string& xp) { o.return_penalty = as_number(x, xp); });
  });
  optional_field(j, "max_delay", path, [&](const Json& v, const std::string& vp) { o.max_delay = as_seconds(v, vp); });
  optional_field(j, "turn_stations", path,
                 [&](const Json& v, const std::string& vp) { o.turn_stations = string_list(v, vp); });
  optional_field(j, "blockage", path, [&](const Json& v, const std::string& vp) {
    expect_object(v, vp, {"start", "end"});
    optional_field(v, "start", vp, [&](const Json& x, const std::string& xp) { o.blockage_start = as_seconds(x, xp); });
    optional_field(v, "end", vp, [&](const Json& x, const std::string& xp) { o.blockage_end = as_seconds(x, xp); });
  });
  return o;
}

Json overrides_to_json(const Overrides& o) {
  Json j = Json::object();
  if (o.default_weight || !o.trip_weights.empty() || !o.line_weights.empty()) {
    Json w = Json::object();
    if (o.default_weight) w["default"] = *o.default_weight;
    if (!o.trip_weights.empty()) w["trips"] = o.trip_weights;
    if (!o.line_weights.empty()) w["lines"] = o.line_weights;
    j["weights"] = std::move(w);
  }
  if (o.turn_penalty || o.return_penalty) {
    Json p = Json::object();
    if (o.turn_penalty) p["turn"] = *o.turn_penalty;
    if (o.return_penalty) p["return"] = *o.return_penalty;
    j["penalties"] = std::move(p);
  }
  if (o.max_delay) j["max_delay"] = *o.max_delay;
  if (o.turn_stations) j["turn_stations"] = *o.turn_stations;
  if (o.blockage_start || o.blockage_end) {
    Json b = Json::object();
    if (o.blockage_start) b["start"] = *o.blockage_start;
    if (o.blockage_end) b["end"] = *o.blockage_end;
    j["blockage"] = std::move(b);
  }
  return j;
}

Scenario apply_overrides(Scenario s, const Overrides& o) {
  Policy& p = s.policy;
  if (o.default_weight) p.default_weight = *o.default_weight;
  for (const auto& [line, w] : o.line_weights) {
    bool found = false;
    for (const Trip& t : s.timetable.trips) {
      if (t.line != line) continue;
      found = true;
      auto it = o.trip_weights.find(t.id);
      if (it != o.trip_weights.end() && it->second != w) {
        throw ValidationError("/overrides/weights/trips/" + t.id,
                              "conflicts with the weight given for line '" + line + "'");
      }
      p.weight_overrides[t.id] = w;
    }
    if (!found) throw ValidationError("/overrides/weights/lines/" + line, "no trip runs on this line");
  }
  for (const auto& [trip, w] : o.trip_weights) {
    if (s.timetable.find_trip(trip) == nullptr) {
      throw ValidationError("/overrides/weights/trips/" + trip, "unknown trip");
    }
    p.weight_overrides[trip] = w;
  }
  for (const auto& [k, w] : p.weight_overrides) {
    if (w < 0) throw ValidationError("/overrides/weights", "weight of '" + k + "' is negative");
  }
  if (p.default_weight < 0) throw ValidationError("/overrides/weights/default", "must not be negative");
  if (o.turn_penalty) {
    if (*o.turn_penalty < 0) throw ValidationError("/overrides/penalties/turn", "must not be negative");
    p.turn_penalty = *o.turn_penalty;
  }
  if (o.return_penalty) {
    if (*o.return_penalty < 0) throw ValidationError("/overrides/penalties/return", "must not be negative");
    p.return_penalty = *o.return_penalty;
  }
  if (o.max_delay) {
    if (*o.max_delay < 0) throw ValidationError("/overrides/max_delay", "must not be negative");
    p.max_delay = *o.max_delay;
  }
  if (o.turn_stations) {
    for (std::size_t i = 0; i < o.turn_stations->size(); ++i) {
      const std::string& st = (*o.turn_stations)[i];
      if (!s.topology.has_station(st)) {
        throw ValidationError("/overrides/turn_stations/" + std::to_string(i), "unknown station '" + st + "'");
      }
      if (!s.topology.is_switch(st)) {
        throw ValidationError("/overrides/turn_stations/" + std::to_string(i), "station '" + st + "' has no switch");
      }
    }
    p.turn_stations = *o.turn_stations;
  }
  if (o.blockage_start || o.blockage_end) {
    const Seconds start = o.blockage_start.value_or(s.disruption.start);
    const Seconds end = o.blockage_end.value_or(s.disruption.end);
    if (end < start) throw ValidationError("/overrides/blockage", "end precedes start");
    s.disruption.start = start;
    if (s.generator && start < s.generator->horizon.start) {
      throw ValidationError("/overrides/blockage/start", "precedes the timetable horizon");
    }
    s = with_duration(std::move(s), end - start);
  }
  s.validate();
  return s;
}

struct Service::Artifacts {
  Scenario scenario;
  Network network;
  SolutionDocument doc;
};

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  fs::create_directories(fs::path(config_.store) / "scenarios");
  fs::create_directories(fs::path(config_.store) / "jobs");
  load_store();
  const int n = std::max(1, config_.workers);
  for (int i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() {
  stop();
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
    for (auto& [id, job] : jobs_) job->cancel = true;
  }
  changed_.notify_all();
  for (auto& t : workers_) t.join();
}

std::string Service::job_dir(const std::string& id) const { return (fs::path(config_.store) / "jobs" / id).string(); }

std::string Service::scenario_path(const std::string& id) const {
  return (fs::path(config_.store) / "scenarios" / (id + ".json")).string();
}

std::optional<Scenario> Service::stored_scenario(const std::string& id) const {
  {
    std::lock_guard lock(mu_);
    auto it = scenarios_.find(id);
    if (it != scenarios_.end()) return it->second;
  }
  if (id.find_first_not_of("0123456789abcdef") != std::string::npos || !fs::exists(scenario_path(id))) {
    return std::nullopt;
  }
  Scenario s = load_scenario(scenario_path(id));
  std::lock_guard lock(mu_);
  scenarios_.emplace(id, s);
  return s;
}

std::string Service::create_scenario(const std::string& body) {
  Scenario s = parse_scenario_text(body);
  const std::string id = scenario_hash(s);
  if (!fs::exists(scenario_path(id))) save_text(scenario_path(id), write_scenario(s));
  std::lock_guard lock(mu_);
  scenarios_.emplace(id, std::move(s));
  return id;
}

std::string Service::start_solve(const std::string& scenario_id, const Json& request) {
  std::optional<Scenario> base = stored_scenario(scenario_id);
  if (!base) throw Error("unknown scenario '" + scenario_id + "'");
  if (!request.is_null()) expect_object(request, "", {"params", "overrides"});
  Overrides overrides;
  SolverDefaults params = base->solver;
  params.time_limit = config_.default_time_limit;
  if (request.is_object()) {
    if (auto it = request.find("overrides"); it != request.end()) overrides = parse_overrides(*it);
    if (auto it = request.find("params"); it != request.end() && !it->is_null()) {
      const SolverDefaults given = parse_solver_defaults(*it, "/params");
      const bool has_limit = it->contains("time_limit");
      params = given;
      if (!has_limit) params.time_limit = config_.default_time_limit;
    }
  }
  Scenario derived = apply_overrides(*base, overrides);
  derived.solver = params;
  const std::string hash = scenario_hash(derived);
  const std::string id = hash;

  std::unique_lock lock(mu_);
  if (auto it = jobs_.find(id); it != jobs_.end()) {
    const JobState st = it->second->state;
    if (st != JobState::Failed && st != JobState::Cancelled) return id;
  }
  lock.unlock();
  if (!fs::exists(scenario_path(hash))) save_text(scenario_path(hash), write_scenario(derived));
  auto job = std::make_shared<Job>();
  job->id = id;
  job->scenario_id = scenario_id;
  job->scenario_hash = hash;
  job->params = params;
  job->overrides = overrides;
  lock.lock();
  scenarios_.emplace(hash, std::move(derived));
  artifacts_.erase(id);
  jobs_[id] = job;
  queue_.push_back(job);
  persist(*job);
  lock.unlock();
  changed_.notify_all();
  return id;
}

std::shared_ptr<Job> Service::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  return it == jobs_.end() ? nullptr : it->second;
}

std::optional<Json> Service::job_json(const std::string& job_id) const {
  auto job = find(job_id);
  if (!job) return std::nullopt;
  std::lock_guard lock(mu_);
  Json j;
  j["id"] = job->id;
  j["scenario_id"] = job->scenario_id;
  j["scenario_hash"] = job->scenario_hash;
  j["state"] = to_string(job->state);
  j["params"] = solver_to_json(job->params);
  j["overrides"] = overrides_to_json(job->overrides);
  j["progress"] = job->progress.empty() ? Json(nullptr) : progress_json(job->progress.back());
  j["result"] = job->has_result ? Json("/jobs/" + job->id + "/solution") : Json(nullptr);
  j["error"] = job->error.empty() ? Json(nullptr) : Json(job->error);
  return j;
}

std::pair<std::vector<Progress>, bool> Service::progress_since(const std::string& job_id, std::size_t from) const {
  auto job = find(job_id);
  if (!job) return {{}, true};
  std::lock_guard lock(mu_);
  std::vector<Progress> out;
  for (std::size_t i = from; i < job->progress.size(); ++i) out.push_back(job->progress[i]);
  return {out, final_state(job->state)};
}

bool Service::cancel(const std::string& job_id) {
  auto job = find(job_id);
  if (!job) return false;
  std::unique_lock lock(mu_);
  job->cancel = true;
  if (job->state == JobState::Queued) {
    std::erase(queue_, job);
    job->state = JobState::Cancelled;
    persist(*job);
  }
  lock.unlock();
  changed_.notify_all();
  return true;
}

bool Service::wait(const std::string& job_id, double timeout_seconds) const {
  auto job = find(job_id);
  if (!job) return false;
  std::unique_lock lock(mu_);
  return changed_.wait_for(lock, std::chrono::duration<double>(timeout_seconds),
                           [&] { return final_state(job->state); });
}

void Service::worker_loop() {
  for (;;) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mu_);
      changed_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = queue_.front();
      queue_.pop_front();
      job->state = JobState::Running;
      persist(*job);
    }
    changed_.notify_all();
    run_job(job);
    changed_.notify_all();
  }
}

void Service::run_job(const std::shared_ptr<Job>& job) {
  JobState final = JobState::Failed;
  std::string error;
  std::shared_ptr<Artifacts> art;
  try {
    std::optional<Scenario> scenario = stored_scenario(job->scenario_hash);
    if (!scenario) throw Error("derived scenario missing from the store");
    PipelineOptions opts = pipeline_options(*scenario);
    opts.control.cancel = &job->cancel;
    opts.control.on_progress = [&](const Progress& p) {
      {
        std::lock_guard lock(mu_);
        if (!job->progress.empty() && p.elapsed < job->progress.back().elapsed) return;
        job->progress.push_back(p);
      }
      changed_.notify_all();
    };
    PipelineResult r = run_pipeline(*scenario, opts);
    const bool cancelled = job->cancel.load();
    if (r.solution && r.report.pass) {
      art = std::make_shared<Artifacts>();
      art->doc.scenario_hash = job->scenario_hash;
      art->doc.scenario_name = scenario->name;
      art->doc.solution = *r.solution;
      art->doc.report = r.report;
      art->doc.solve = SolveSummary::from(r.result, r.model);
      art->network = std::move(r.network);
      art->scenario = std::move(*scenario);
      fs::create_directories(job_dir(job->id));
      save_text((fs::path(job_dir(job->id)) / "solution.json").string(), write_solution(art->doc, art->network));
      final = cancelled ? JobState::Cancelled : JobState::Done;
    } else if (cancelled) {
      final = JobState::Cancelled;
    } else if (r.solution) {
      error = "solution failed verification";
      if (!r.report.violations.empty()) error += ": " + r.report.violations.front().message;
    } else {
      error = std::string("no recovery found (solver status ") + to_string(r.result.status) + ")";
    }
  } catch (const std::exception& e) {
    error = e.what();
  }
  std::lock_guard lock(mu_);
  if (art) {
    artifacts_[job->id] = art;
    job->has_result = true;
  }
  job->state = final;
  job->error = error;
  persist(*job);
}

void Service::persist(const Job& job) const {
  Json j;
  j["id"] = job.id;
  j["scenario_id"] = job.scenario_id;
  j["scenario_hash"] = job.scenario_hash;
  j["state"] = to_string(job.state);
  j["params"] = solver_to_json(job.params);
  j["overrides"] = overrides_to_json(job.overrides);
  Json prog = Json::array();
  for (const Progress& p : job.progress) prog.push_back(progress_json(p));
  j["progress"] = std::move(prog);
  j["has_result"] = job.has_result;
  j["error"] = job.error;
  fs::create_directories(job_dir(job.id));
  const fs::path final_path = fs::path(job_dir(job.id)) / "job.json";
  const fs::path tmp = fs::path(job_dir(job.id)) / "job.json.tmp";
  save_text(tmp.string(), j.dump(2) + "\n");
  fs::rename(tmp, final_path);
}

void Service::load_store() {
  const fs::path dir = fs::path(config_.store) / "jobs";
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path file = entry.path() / "job.json";
    if (!fs::exists(file)) continue;
    try {
      const Json j = Json::parse(load_text(file.string()));
      auto job = std::make_shared<Job>();
      job->id = j.at("id").get<std::string>();
      job->scenario_id = j.at("scenario_id").get<std::string>();
      job->scenario_hash = j.at("scenario_hash").get<std::string>();
      job->params = parse_solver_defaults(j.at("params"), "/params");
      job->overrides = parse_overrides(j.at("overrides"));
      for (const Json& p : j.at("progress")) job->progress.push_back(progress_from_json(p));
      job->has_result = j.at("has_result").get<bool>() && fs::exists(entry.path() / "solution.json");
      job->error = j.at("error").get<std::string>();
      job->state = parse_state(j.at("state").get<std::string>()).value_or(JobState::Failed);
      if (!final_state(job->state)) {
        // Interrupted by a shutdown; run it again.
        job->state = JobState::Queued;
        job->progress.clear();
        queue_.push_back(job);
      }
      jobs_[job->id] = job;
    } catch (const std::exception&) {
      // Unreadable records are skipped rather than blocking startup.
    }
  }
}

std::shared_ptr<const Service::Artifacts> Service::artifacts(const Job& job) const {
  {
    std::lock_guard lock(mu_);
    auto it = artifacts_.find(job.id);
    if (it != artifacts_.end()) return it->second;
  }
  std::optional<Scenario> scenario = stored_scenario(job.scenario_hash);
  if (!scenario) return nullptr;
  auto art = std::make_shared<Artifacts>();
  art->network = build_network(*scenario);
  art->doc = read_solution_text(load_text((fs::path(job_dir(job.id)) / "solution.json").string()), job.scenario_hash);
  art->scenario = std::move(*scenario);
  std::lock_guard lock(mu_);
  artifacts_[job.id] = art;
  return art;
}

Service::Body Service::solution(const std::string& job_id, const std::string& format) const {
  Body b;
  auto job = find(job_id);
  if (!job) {
    b.status = 404;
    b.text = error_json("unknown job '" + job_id + "'").dump();
    return b;
  }
  JobState state;
  bool has_result;
  {
    std::lock_guard lock(mu_);
    state = job->state;
    has_result = job->has_result;
  }
  if (!has_result) {
    if (final_state(state)) {
      b.status = 404;
      b.text = error_json(std::string("job ") + to_string(state) + " without a result").dump();
    } else {
      b.status = 409;
      b.text = error_json(std::string("job is ") + to_string(state) + "; retry later").dump();
    }
    return b;
  }
  if (format != "document" && format != "diagram" && format != "summary") {
    b.status = 400;
    b.text = error_json("format must be document, diagram or summary", "format").dump();
    return b;
  }
  auto art = artifacts(*job);
  if (!art || !art->doc.report.pass) {
    b.status = 500;
    b.text = error_json("stored result is unavailable").dump();
    return b;
  }
  if (format == "document") {
    b.text = write_solution(art->doc, art->network);
  } else if (format == "summary") {
    b.text = solution_summary(art->doc, art->network).dump(2);
  } else {
    b.content_type = "image/svg+xml";
    b.text = render_time_space_diagram(art->scenario, art->network, art->doc.solution);
  }
  return b;
}

Json Service::health() const {
  std::lock_guard lock(mu_);
  std::size_t running = 0;
  for (const auto& [id, job] : jobs_) running += job->state == JobState::Running ? 1 : 0;
  return Json{{"status", "ok"},
              {"schema_version", kSchemaVersion},
              {"workers", config_.workers},
              {"queued", queue_.size()},
              {"running", running},
              {"jobs", jobs_.size()}};
}

void Service::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  httplib::Server& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  auto json_reply = [](httplib::Response& res, int status, const Json& j) {
    res.status = status;
    res.set_content(j.dump(2), "application/json");
  };

  srv.Get("/healthz", [this, json_reply](const httplib::Request&, httplib::Response& res) {
    json_reply(res, 200, health());
  });

  srv.Post("/scenarios", [this, json_reply](const httplib::Request& req, httplib::Response& res) {
    try {
      const std::string id = create_scenario(req.body);
      json_reply(res, 201, Json{{"id", id}});
    } catch (const ValidationError& e) {
      json_reply(res, 422, error_json(e.what(), e.path()));
    } catch (const std::exception& e) {
      json_reply(res, 422, error_json(e.what()));
    }
  });

  srv.Post(R"(/scenarios/([0-9a-zA-Z]+)/solve)", [this, json_reply](const httplib::Request& req,
                                                                       httplib::Response& res) {
    const std::string sid = req.matches[1];
    Json body;
    if (!req.body.empty()) {
      try {
        body = Json::parse(req.body);
      } catch (const Json::parse_error& e) {
        json_reply(res, 400, error_json(std::string("malformed JSON: ") + e.what()));
        return;
      }
    }
    if (!stored_scenario(sid)) {
      json_reply(res, 404, error_json("unknown scenario '" + sid + "'"));
      return;
    }
    try {
      const std::string id = start_solve(sid, body);
      json_reply(res, 202, *job_json(id));
    } catch (const ValidationError& e) {
      json_reply(res, 422, error_json(e.what(), e.path()));
    } catch (const std::exception& e) {
      json_reply(res, 422, error_json(e.what()));
    }
  });

  srv.Get(R"(/jobs/([0-9a-zA-Z]+))", [this, json_reply](const httplib::Request& req, httplib::Response& res) {
    auto j = job_json(req.matches[1]);
    if (!j) {
      json_reply(res, 404, error_json("unknown job"));
      return;
    }
    json_reply(res, 200, *j);
  });

  srv.Post(R"(/jobs/([0-9a-zA-Z]+)/cancel)", [this, json_reply](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!cancel(id)) {
      json_reply(res, 404, error_json("unknown job"));
      return;
    }
    json_reply(res, 202, *job_json(id));
  });

  srv.Get(R"(/jobs/([0-9a-zA-Z]+)/solution)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string format = req.has_param("format") ? req.get_param_value("format") : "document";
    const Body b = solution(req.matches[1], format);
    res.status = b.status;
    if (b.status == 409) res.set_header("Retry-After", "1");
    res.set_content(b.text, b.content_type);
  });

  srv.Get(R"(/jobs/([0-9a-zA-Z]+)/events)", [this, json_reply](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!find(id)) {
      json_reply(res, 404, error_json("unknown job"));
      return;
    }
    res.set_header("Cache-Control", "no-cache");
    auto sent = std::make_shared<std::size_t>(0);
    auto idle = std::make_shared<int>(0);
    res.set_chunked_content_provider("text/event-stream", [this, id, sent, idle](std::size_t,
                                                                                   httplib::DataSink& sink) {
      if (!sink.is_writable()) return false;
      {
        std::unique_lock lock(mu_);
        auto job = jobs_.at(id);
        changed_.wait_for(lock, std::chrono::seconds(1), [&] {
          return stopping_ || job->progress.size() > *sent || final_state(job->state);
        });
      }
      auto [batch, done] = progress_since(id, *sent);
      std::string out;
      for (const Progress& p : batch) out += "event: progress\ndata: " + progress_json(p).dump() + "\n\n";
      *sent += batch.size();
      if (done) out += "event: state\ndata: " + job_json(id)->dump() + "\n\n";
      if (out.empty()) {
        if (++*idle < 15) return true;
        out = ": keep-alive\n\n";
      }
      *idle = 0;
      if (!sink.write(out.data(), out.size())) return false;
      if (done) sink.done();
      return true;
    });
  });
}

void Service::listen() {
  install_routes();
  if (!server_->listen(config_.host, config_.port)) {
    throw Error("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
  }
}

int Service::start() {
  install_routes();
  const int port = config_.port == 0 ? server_->bind_to_any_port(config_.host)
                                     : (server_->bind_to_port(config_.host, config_.port) ? config_.port : -1);
  if (port < 0) throw Error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Service::stop() {
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace railrecover
