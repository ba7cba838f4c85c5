// Copyright 2026 The dailystudy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "dailystudy/analytics.hpp"
#include "dailystudy/clock.hpp"
#include "dailystudy/config_io.hpp"
#include "dailystudy/errors.hpp"
#include "dailystudy/eventlog.hpp"
#include "dailystudy/gateway.hpp"
#include "dailystudy/http_api.hpp"
#include "dailystudy/reports.hpp"
#include "dailystudy/service.hpp"
#include "dailystudy/simulator.hpp"
#include "dailystudy/stats.hpp"
#include "dailystudy/store.hpp"

namespace fs = std::filesystem;
using namespace dailystudy;

namespace {

fs::path default_log_dir() {
  if (const char* env = std::getenv("DAILYSTUDY_LOG_DIR")) return env;
  return "studylog";
}

StudyConfig config_for(const fs::path& log_dir, const std::string& override_path) {
  if (!override_path.empty()) return load_study_config(override_path);
  const fs::path installed = log_dir / "study.conf";
  if (fs::exists(installed)) return load_study_config(installed);
  return parse_study_config(default_study_config_text());
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(Err::StorageError, "cannot write " + file.string());
  out << text;
}

StudyStore replayed(const StudyConfig& config, const fs::path& log_dir) {
  EventLog log(log_dir);
  return replay(config, log);
}

HttpApi* g_api = nullptr;

void handle_signal(int) {
  if (g_api != nullptr) g_api->stop();
}

int run_serve(const StudyConfig& config, const fs::path& log_dir,
              const std::string& host, int port) {
  EventLog log(log_dir);
  SystemClock clock;
  MockCrowdGateway crowd(&clock);
  MockPushGateway push(&clock);
  StudyService service(config, log, crowd, push, clock);
  try {
    service.publish_enrollment_hit();
  } catch (const StudyError& e) {
    if (e.code() != Err::DuplicateHit) throw;
  }
  HttpApi api(service);
  g_api = &api;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  // Scheduler heartbeat: reminders fire within seconds of their local time.
  std::atomic<bool> stopping{false};
  std::thread ticker([&] {
    while (!stopping.load()) {
      try {
        service.tick();
      } catch (const std::exception& e) {
        std::cerr << "tick: " << e.what() << "\n";
      }
      for (int i = 0; i < 30 && !stopping.load(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(500));
      }
    }
  });

  std::cerr << "serving on " << host << ":" << port << ", log at " << log_dir
            << "\n";
  const bool ok = api.listen(host, port);
  stopping.store(true);
  ticker.join();
  g_api = nullptr;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longitudinal daily-task study orchestration"};
  app.require_subcommand(1);

  std::string log_dir_flag;
  app.add_option("--log-dir", log_dir_flag,
                 "Event log directory (default $DAILYSTUDY_LOG_DIR or "
                 "./studylog)");

  // init
  auto* init = app.add_subcommand(
      "init", "Validate a study config and install it into the log dir");
  std::string init_config;
  bool init_template = false;
  init->add_option("config", init_config, "Study config file");
  init->add_flag("--template", init_template,
                 "Print a default config template and exit");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  std::string serve_config;
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port");
  serve->add_option("--config", serve_config, "Study config file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the worker simulator");
  std::uint64_t sim_seed = 42;
  std::string sim_workers;
  std::string sim_config_path;
  std::string sim_study_config;
  double dup_rate = -1.0, fail_rate = -1.0;
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--workers", sim_workers,
                       "Cohort sizes, e.g. HI:44,HC:54,LC:89");
  simulate->add_option("--sim-config", sim_config_path, "Sim config file");
  simulate->add_option("--config", sim_study_config, "Study config file");
  simulate->add_option("--duplicate-rate", dup_rate,
                       "Same-day duplicate submission rate");
  simulate->add_option("--gateway-failure-rate", fail_rate,
                       "Transient gateway failure rate");

  // report
  auto* report = app.add_subcommand("report", "Render a report from the log");
  std::string report_kind;
  std::string report_variant = "welch";
  std::string report_config;
  report->add_option("kind", report_kind, "retention|payments|histogram|tests")
      ->required();
  report->add_option("--variant", report_variant, "t-test variant for tests");
  report->add_option("--config", report_config, "Study config file");

  // export
  auto* exp = app.add_subcommand("export", "Write CSV artifacts");
  std::string exp_format = "csv";
  std::string exp_out = ".";
  std::string exp_config;
  exp->add_option("--format", exp_format, "Only csv is supported");
  exp->add_option("--out", exp_out, "Output directory");
  exp->add_option("--config", exp_config, "Study config file");

  // paytable
  auto* paytable = app.add_subcommand("paytable", "Print the payment table");
  std::string paytable_config;
  paytable->add_option("--config", paytable_config, "Study config file");

  // compact
  auto* compact = app.add_subcommand(
      "compact", "Fold the event log into a snapshot plus empty tail");
  std::string compact_config;
  compact->add_option("--config", compact_config, "Study config file");

  CLI11_PARSE(app, argc, argv);

  const fs::path log_dir =
      log_dir_flag.empty() ? default_log_dir() : fs::path(log_dir_flag);

  try {
    if (init->parsed()) {
      if (init_template) {
        std::cout << default_study_config_text();
        return 0;
      }
      if (init_config.empty()) {
        std::cerr << "init: config path required (or --template)\n";
        return 1;
      }
      const StudyConfig config = load_study_config(init_config);
      fs::create_directories(log_dir);
      fs::copy_file(init_config, log_dir / "study.conf",
                    fs::copy_options::overwrite_existing);
      std::cout << "installed " << init_config << " into " << log_dir << " ("
                << config.schemes.size() << " schemes, "
                << config.duration_days << " days)\n";
      return 0;
    }

    if (serve->parsed()) {
      fs::create_directories(log_dir);
      return run_serve(config_for(log_dir, serve_config), log_dir, serve_host,
                       serve_port);
    }

    if (simulate->parsed()) {
      SimConfig sim;
      if (!sim_config_path.empty()) sim = load_sim_config(sim_config_path);
      if (simulate->count("--seed") > 0 || sim_config_path.empty()) {
        sim.seed = sim_seed;
      }
      if (!sim_workers.empty()) {
        sim.workers_per_scheme.clear();
        std::istringstream in(sim_workers);
        std::string part;
        while (std::getline(in, part, ',')) {
          const auto colon = part.rfind(':');
          if (colon == std::string::npos) {
            std::cerr << "bad --workers entry: " << part << "\n";
            return 1;
          }
          sim.workers_per_scheme[part.substr(0, colon)] =
              std::stoi(part.substr(colon + 1));
        }
      }
      if (dup_rate >= 0.0) sim.duplicate_submission_rate = dup_rate;
      if (fail_rate >= 0.0) sim.gateway_failure_rate = fail_rate;

      const StudyConfig config = config_for(log_dir, sim_study_config);
      fs::create_directories(log_dir);
      if (fs::exists(log_dir / "events.ndjson") &&
          fs::file_size(log_dir / "events.ndjson") > 0) {
        std::cerr << "refusing to simulate into non-empty log " << log_dir
                  << "\n";
        return 1;
      }
      const SimResult r = simulate_study(sim, config, log_dir);
      std::cout << "enrolled: " << r.enrolled << "\n"
                << "completed_all_days: " << r.completed_all << "\n"
                << "measurements: " << r.measurements << "\n"
                << "notifications_sent: " << r.notifications_sent << "\n"
                << "duplicates_rejected: " << r.duplicate_attempts_rejected
                << "\n"
                << "survey_hit: " << r.survey_hit_id << " ("
                << r.qualification_holders << " qualified)\n";
      return 0;
    }

    if (report->parsed()) {
      const StudyConfig config = config_for(log_dir, report_config);
      const StudyStore store = replayed(config, log_dir);
      if (report_kind == "retention") {
        std::cout << retention_report_text(store);
      } else if (report_kind == "payments") {
        std::cout << payments_report_text(config, store);
      } else if (report_kind == "histogram") {
        std::cout << histogram_csv(store);
      } else if (report_kind == "tests") {
        const TTestVariant v = report_variant == "pooled"
                                   ? TTestVariant::pooled
                                   : TTestVariant::welch;
        std::cout << battery_text(store, v);
      } else {
        std::cerr << "unknown report: " << report_kind << "\n";
        return 1;
      }
      return 0;
    }

    if (exp->parsed()) {
      if (exp_format != "csv") {
        std::cerr << "unknown format: " << exp_format << "\n";
        return 1;
      }
      const StudyConfig config = config_for(log_dir, exp_config);
      const StudyStore store = replayed(config, log_dir);
      const CompletionMatrix matrix = completion_matrix(store);
      fs::create_directories(exp_out);
      const fs::path out(exp_out);
      write_text(out / "paytable.csv", paytable_csv(config));
      write_text(out / "histogram.csv", histogram_csv(store));
      write_text(out / "completion.csv", completion_csv(matrix));
      write_text(out / "tests.csv", tests_csv(store, TTestVariant::welch));
      write_text(out / "payments.csv", payments_report_text(config, store));
      write_text(out / "heatmap.pbm", heatmap_pbm(matrix));
      std::cout << "wrote 6 artifacts to " << out << "\n";
      return 0;
    }

    if (paytable->parsed()) {
      std::cout << paytable_text(config_for(log_dir, paytable_config));
      return 0;
    }

    if (compact->parsed()) {
      const StudyConfig config = config_for(log_dir, compact_config);
      EventLog log(log_dir);
      const StudyStore store = replay(config, log);
      log.compact(store.to_json(), store.last_seq());
      std::cout << "compacted " << log_dir << " at seq " << store.last_seq()
                << "\n";
      return 0;
    }
  } catch (const StudyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
