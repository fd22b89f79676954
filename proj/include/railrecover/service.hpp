#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "railrecover/io.hpp"

namespace httplib {
class Server;
}

namespace railrecover {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store = "railrecover-store";
  int workers = 1;
  double default_time_limit = 60.0;

  // RAILRECOVER_LISTEN (host:port), RAILRECOVER_STORE, RAILRECOVER_WORKERS,
  // RAILRECOVER_TIME_LIMIT; unset variables keep the defaults.
  static ServiceConfig from_env();
};

enum class JobState { Queued, Running, Done, Failed, Cancelled };
[[nodiscard]] const char* to_string(JobState state);

// What-if changes applied to a copy of a stored scenario.
struct Overrides {
  std::optional<double> default_weight;
  std::map<std::string, double> trip_weights;
  std::map<std::string, double> line_weights;  // applied to every trip of the line
  std::optional<double> turn_penalty;
  std::optional<double> return_penalty;
  std::optional<Seconds> max_delay;
  std::optional<std::vector<std::string>> turn_stations;
  std::optional<Seconds> blockage_start;
  std::optional<Seconds> blockage_end;
};

[[nodiscard]] Overrides parse_overrides(const Json& j);
[[nodiscard]] Json overrides_to_json(const Overrides& o);
// Throws ValidationError when the overrides contradict each other or the
// scenario.
[[nodiscard]] Scenario apply_overrides(Scenario scenario, const Overrides& overrides);

struct Job {
  std::string id;
  std::string scenario_id;    // stored scenario the job derives from
  std::string scenario_hash;  // derived scenario
  SolverDefaults params;
  Overrides overrides;
  JobState state = JobState::Queued;
  std::vector<Progress> progress;  // snapshots in time order
  std::string error;
  bool has_result = false;
  std::atomic<bool> cancel{false};
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Content-addressed: the same scenario yields the same id.
  std::string create_scenario(const std::string& body);
  // Request body {"params": solver section, "overrides": {...}}. The job id
  // is the hash of the derived scenario, so identical requests share a job.
  std::string start_solve(const std::string& scenario_id, const Json& request);
  [[nodiscard]] std::optional<Json> job_json(const std::string& job_id) const;
  // Progress snapshots from index `from` on, and whether the job is final.
  [[nodiscard]] std::pair<std::vector<Progress>, bool> progress_since(const std::string& job_id,
                                                                      std::size_t from) const;
  bool cancel(const std::string& job_id);
  // Blocks until the job reaches a final state or the timeout passes.
  bool wait(const std::string& job_id, double timeout_seconds) const;

  struct Body {
    int status = 200;
    std::string content_type = "application/json";
    std::string text;
  };
  [[nodiscard]] Body solution(const std::string& job_id, const std::string& format) const;
  [[nodiscard]] Json health() const;

  // HTTP front end. `listen` blocks; `start` binds (port 0 picks a free
  // port) and serves on a background thread, returning the port.
  void listen();
  int start();
  void stop();

 private:
  struct Artifacts;
  [[nodiscard]] std::shared_ptr<const Artifacts> artifacts(const Job& job) const;
  [[nodiscard]] std::optional<Scenario> stored_scenario(const std::string& id) const;
  void worker_loop();
  void run_job(const std::shared_ptr<Job>& job);
  void persist(const Job& job) const;
  void load_store();
  [[nodiscard]] std::shared_ptr<Job> find(const std::string& id) const;
  [[nodiscard]] std::string job_dir(const std::string& id) const;
  [[nodiscard]] std::string scenario_path(const std::string& id) const;
  void install_routes();

  ServiceConfig config_;
  mutable std::mutex mu_;
  mutable std::condition_variable changed_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::deque<std::shared_ptr<Job>> queue_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
  mutable std::map<std::string, std::shared_ptr<const Artifacts>> artifacts_;
  mutable std::map<std::string, Scenario> scenarios_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
};

}  // namespace railrecover
