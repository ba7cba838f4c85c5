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

#include "dailystudy/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <tuple>
#include <utility>

#include "dailystudy/clock.hpp"
#include "dailystudy/errors.hpp"
#include "dailystudy/eventlog.hpp"
#include "dailystudy/measurements.hpp"
#include "dailystudy/notifications.hpp"
#include "dailystudy/service.hpp"
#include "dailystudy/store.hpp"

namespace dailystudy {
namespace {

// Uniform in [0, 1) built directly from the generator's 64-bit output, so
// the draw sequence is fixed by the standard rather than by a library's
// distribution implementation.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_prob(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    fail(Err::BadConfig, std::string(name) + " must be in [0, 1]");
  }
}

template <typename F>
auto with_retries(F&& f) {
  for (int attempt = 0;; ++attempt) {
    try {
      return f();
    } catch (const StudyError& e) {
      if (e.code() != Err::GatewayError || attempt >= 500) throw;
    }
  }
}

}  // namespace

double BehaviorProfile::terminal_hazard(int missed_streak) const {
  if (missed_streak <= 0) return 0.0;
  return std::min(1.0, hazard_base + hazard_step * (missed_streak - 1));
}

double BehaviorProfile::sensitivity(const std::string& scheme_id) const {
  auto it = scheme_sensitivity.find(scheme_id);
  return it == scheme_sensitivity.end() ? 1.0 : it->second;
}

void BehaviorProfile::validate() const {
  check_prob(p_abandon_after_first, "p_abandon_after_first");
  check_prob(base_daily_completion, "base_daily_completion");
  check_prob(notification_responsiveness, "notification_responsiveness");
  check_prob(hazard_base, "hazard_base");
  check_prob(morning_share, "morning_share");
  if (hazard_step < 0.0) {
    fail(Err::BadConfig, "hazard_step must be >= 0 (hazard is non-decreasing)");
  }
  for (const auto& [id, mult] : scheme_sensitivity) {
    if (mult <= 0.0) fail(Err::BadConfig, "scheme_sensitivity must be > 0");
  }
}

void SimConfig::validate() const {
  if (workers_per_scheme.empty()) {
    fail(Err::BadConfig, "workers_per_scheme is empty");
  }
  for (const auto& [id, n] : workers_per_scheme) {
    if (n < 1) fail(Err::BadConfig, "worker count for " + id + " must be >= 1");
  }
  if (duplicate_submission_rate < 0.0 || duplicate_submission_rate > 0.95 ||
      gateway_failure_rate < 0.0 || gateway_failure_rate > 0.95) {
    fail(Err::BadConfig, "injection rates must be in [0, 0.95]");
  }
  if (worker_jitter < 0.0 || worker_jitter > 0.5) {
    fail(Err::BadConfig, "worker_jitter must be in [0, 0.5]");
  }
  if (timezones.size() != timezone_weights.size()) {
    fail(Err::BadConfig, "timezones and timezone_weights differ in length");
  }
  for (double w : timezone_weights) {
    if (w <= 0.0) fail(Err::BadConfig, "timezone weights must be > 0");
  }
  profile.validate();
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + index * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DayDecision worker_day_decision(const BehaviorProfile& profile,
                                const std::string& scheme_id,
                                const DayState& state, std::mt19937_64& rng,
                                double duplicate_rate) {
  // Always consume the same six draws so parallel runs that differ only in
  // parameters see identical randomness day by day.
  const double u_drop = uniform01(rng);
  const double u_base = uniform01(rng);
  const double u_resp = uniform01(rng);
  const double u_mode = uniform01(rng);
  const double u_time = uniform01(rng);
  const double u_dup = uniform01(rng);

  DayDecision d;
  if (state.day_index == 2 && u_drop < profile.p_abandon_after_first) {
    d.kind = DayDecision::Kind::DropPermanently;
    return d;
  }
  if (state.missed_streak >= 1 &&
      u_drop < profile.terminal_hazard(state.missed_streak)) {
    d.kind = DayDecision::Kind::DropPermanently;
    return d;
  }

  const double p_unprompted =
      clamp01(profile.base_daily_completion * profile.sensitivity(scheme_id));
  if (u_base < p_unprompted) {
    d.kind = DayDecision::Kind::CompleteAt;
    d.local_time = MinutesOfDay{static_cast<int>(u_time * 1440.0)};
    d.via_notification = false;
  } else if (state.reminders_scheduled_today &&
             u_resp < profile.notification_responsiveness) {
    d.kind = DayDecision::Kind::CompleteAt;
    d.evening = u_mode >= profile.morning_share;
    const int base_minute = d.evening ? 19 * 60 : 9 * 60;
    d.local_time = MinutesOfDay{base_minute + static_cast<int>(u_time * 10.0)};
    d.via_notification = true;
  } else {
    d.kind = DayDecision::Kind::Skip;
    return d;
  }
  d.duplicate_attempt = u_dup < duplicate_rate;
  return d;
}

namespace {

struct WorkerSim {
  int index = 0;
  std::string worker_id;
  std::string device_id;
  std::string scheme_id;
  std::string tz_id;
  TimeZone tz;
  LocalDay day1{};
  UtcTime enroll_at{};
  MinutesOfDay enroll_minutes{};
  std::mt19937_64 rng;
  double base = 0.0;
  double resp = 0.0;
  int last_completed = 0;
  bool dropped = false;
  bool enrolled = false;
};

struct AgendaItem {
  UtcTime at{};
  long seq = 0;
  enum class Kind { Enroll, Decide, Submit } kind = Kind::Enroll;
  int worker = 0;
  int day = 0;
  bool duplicate = false;
};

struct AgendaOrder {
  bool operator()(const AgendaItem& a, const AgendaItem& b) const {
    return std::tie(a.at, a.seq) > std::tie(b.at, b.seq);
  }
};

std::string pad3(const char* prefix, int n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, n);
  return buf;
}

Demographics sim_demographics(int idx, const std::string& tz_id) {
  Demographics d;
  if (tz_id == "Europe/London") {
    d.country = "GB";
  } else if (tz_id == "Europe/Berlin") {
    d.country = "DE";
  } else {
    d.country = "US";
  }
  if (idx % 8 == 0) {
    d.dominant_hand = "left";
  } else if (idx % 40 == 1) {
    d.dominant_hand = "ambidextrous";
  } else {
    d.dominant_hand = "right";
  }
  d.height_cm = 155.0 + (idx * 3) % 40;
  d.weight_kg = 52.0 + (idx * 5) % 50;
  d.gender = (idx % 31 == 7) ? "prefer not to say"
                             : (idx % 2 ? "female" : "male");
  return d;
}

MeasurementPayload sim_payload(int idx, int day, int required) {
  MeasurementPayload mp;
  const int wrong = ((idx + day) % 4 == 0) ? 1 : 0;
  mp.scroll_rounds = make_rounds(required, wrong);
  mp.swipe_rounds = make_rounds(required, (idx + day) % 5 == 0 ? 1 : 0);
  mp.duration_seconds = 190 + (idx * 7 + day * 13) % 110;
  return mp;
}

}  // namespace

SimResult simulate_study(const SimConfig& sim_in, const StudyConfig& study,
                         const std::filesystem::path& log_dir) {
  SimConfig sim = sim_in;
  if (sim.start == UtcTime{}) sim.start = parse_utc("2021-03-01T00:00:00Z");
  if (sim.timezones.empty()) {
    sim.timezones = {"America/New_York",    "America/Chicago",
                     "America/Denver",      "America/Phoenix",
                     "America/Los_Angeles", "Europe/London",
                     "Europe/Berlin"};
    sim.timezone_weights = {0.30, 0.20, 0.08, 0.05, 0.22, 0.10, 0.05};
  }
  sim.validate();
  study.validate();

  double weight_total = 0.0;
  for (double w : sim.timezone_weights) weight_total += w;

  VirtualClock clock(sim.start);
  EventLog log(log_dir);
  MockCrowdGateway crowd(&clock);
  MockPushGateway push(&clock);
  if (sim.gateway_failure_rate > 0.0) {
    crowd.set_failure(sim.gateway_failure_rate,
                      splitmix64(sim.seed, 0xFA11));
  }

  // Roster: worker substreams are derived from the master seed by index, so
  // any one worker's behavior is reproducible independent of the others.
  std::vector<WorkerSim> workers;
  std::map<std::string, std::string> scheme_of;
  int idx = 0;
  for (const auto& [scheme_id, count] : sim.workers_per_scheme) {
    for (int i = 0; i < count; ++i) {
      WorkerSim w;
      w.index = ++idx;
      w.worker_id = pad3("w", w.index);
      w.device_id = pad3("dev-", w.index);
      w.scheme_id = scheme_id;
      w.rng.seed(splitmix64(sim.seed, 101 + w.index));
      const double u_tz = uniform01(w.rng);
      const double u_base = uniform01(w.rng);
      const double u_resp = uniform01(w.rng);
      const double u_enroll = uniform01(w.rng);

      double acc = 0.0;
      std::size_t pick = sim.timezones.size() - 1;
      for (std::size_t z = 0; z < sim.timezones.size(); ++z) {
        acc += sim.timezone_weights[z] / weight_total;
        if (u_tz < acc) {
          pick = z;
          break;
        }
      }
      w.tz_id = sim.timezones[pick];
      w.tz = TimeZone::of(w.tz_id);
      w.base = clamp01(sim.profile.base_daily_completion +
                       (u_base * 2.0 - 1.0) * sim.worker_jitter);
      w.resp = clamp01(sim.profile.notification_responsiveness +
                       (u_resp * 2.0 - 1.0) * sim.worker_jitter);
      // Everyone enrolls on their first full local day after the sim start,
      // at a daytime hour of their own.
      w.day1 = w.tz.local_day(sim.start) + std::chrono::days{1};
      w.enroll_minutes =
          MinutesOfDay{8 * 60 + static_cast<int>(u_enroll * 720.0)};
      w.enroll_at = w.tz.at_local(w.day1, w.enroll_minutes);
      scheme_of[w.worker_id] = scheme_id;
      workers.push_back(std::move(w));
    }
  }

  ServiceOptions opts;
  opts.code_seed = splitmix64(sim.seed, 0xC0DE);
  opts.scheme_allocator = [scheme_of](const std::string& worker_id) {
    return scheme_of.at(worker_id);
  };
  StudyService service(study, log, crowd, push, clock, opts);
  with_retries([&] { service.publish_enrollment_hit(); });

  SimResult result;
  std::priority_queue<AgendaItem, std::vector<AgendaItem>, AgendaOrder> agenda;
  long next_seq = 0;
  auto push_item = [&](UtcTime at, AgendaItem::Kind kind, int worker, int day,
                       bool duplicate = false) {
    agenda.push(AgendaItem{at, ++next_seq, kind, worker, day, duplicate});
  };
  for (const auto& w : workers) {
    push_item(w.enroll_at, AgendaItem::Kind::Enroll, w.index, 1);
  }

  auto handle_enroll = [&](WorkerSim& w) {
    EnrollmentStart es;
    es.device_id = w.device_id;
    es.device_model = "Pixel 4";
    es.timezone = w.tz_id;
    es.demographics = sim_demographics(w.index, w.tz_id);
    es.consent.toggles = std::vector<bool>(5, true);
    es.consent.at = clock.now();
    service.start_enrollment(es);
    const std::string code = service.submit_first_measurement(
        w.device_id, sim_payload(w.index, 1, study.required_correct_rounds));
    const std::string asg = with_retries(
        [&] { return crowd.submit_assignment(service.hit_id(), w.worker_id); });
    service.validate_submission(w.worker_id, asg, code);
    w.enrolled = true;
    w.last_completed = 1;
    push_item(w.tz.at_local(w.day1 + std::chrono::days{1}, MinutesOfDay{0}),
              AgendaItem::Kind::Decide, w.index, 2);
  };

  auto handle_decide = [&](WorkerSim& w, int day) {
    if (w.dropped || day > study.duration_days) return;
    const Participant* p = service.store().find_participant(w.worker_id);
    if (p == nullptr || is_terminal(p->state)) return;

    DayState st;
    st.day_index = day;
    st.reminders_scheduled_today = w.last_completed == day - 1;
    st.missed_streak = day - 1 - w.last_completed;
    BehaviorProfile prof = sim.profile;
    prof.base_daily_completion = w.base;
    prof.notification_responsiveness = w.resp;
    const DayDecision d = worker_day_decision(prof, w.scheme_id, st, w.rng,
                                              sim.duplicate_submission_rate);
    if (d.kind == DayDecision::Kind::DropPermanently) {
      w.dropped = true;
      return;
    }
    const LocalDay today = w.day1 + std::chrono::days{day - 1};
    push_item(w.tz.at_local(today + std::chrono::days{1}, MinutesOfDay{0}),
              AgendaItem::Kind::Decide, w.index, day + 1);
    if (d.kind == DayDecision::Kind::CompleteAt) {
      push_item(w.tz.at_local(today, d.local_time), AgendaItem::Kind::Submit,
                w.index, day, d.duplicate_attempt);
    }
  };

  auto handle_submit = [&](WorkerSim& w, int day, bool duplicate) {
    if (w.dropped) return;
    const Participant* p = service.store().find_participant(w.worker_id);
    if (p == nullptr || is_terminal(p->state)) return;
    const MeasurementPayload mp =
        sim_payload(w.index, day, study.required_correct_rounds);
    try {
      service.submit_measurement(w.worker_id, mp);
      w.last_completed = day;
    } catch (const StudyError& e) {
      if (e.code() == Err::DuplicateDay) {
        ++result.duplicate_attempts_rejected;
        return;
      }
      if (e.code() == Err::WindowExpired) return;
      throw;
    }
    if (duplicate) {
      try {
        service.submit_measurement(w.worker_id, mp);
      } catch (const StudyError& e) {
        // A duplicate of the study's final measurement races the Completed
        // transition and is refused as an illegal transition rather than a
        // duplicate day; both count as rejected duplicates here.
        if (e.code() != Err::DuplicateDay &&
            e.code() != Err::IllegalTransition) {
          throw;
        }
        ++result.duplicate_attempts_rejected;
      }
    }
  };

  const UtcTime horizon =
      sim.start + std::chrono::days{study.duration_days + 3};
  for (UtcTime t = sim.start; t <= horizon; t += std::chrono::minutes{1}) {
    clock.set(t);
    service.tick();
    while (!agenda.empty() && agenda.top().at <= t) {
      const AgendaItem item = agenda.top();
      agenda.pop();
      WorkerSim& w = workers[item.worker - 1];
      switch (item.kind) {
        case AgendaItem::Kind::Enroll:
          handle_enroll(w);
          break;
        case AgendaItem::Kind::Decide:
          handle_decide(w, item.day);
          break;
        case AgendaItem::Kind::Submit:
          handle_submit(w, item.day, item.duplicate);
          break;
      }
    }
  }
  // Flush any gateway calls still pending after transient failures.
  for (int i = 0; i < 1000 && service.pending_gateway_ops() > 0; ++i) {
    clock.advance(std::chrono::seconds{60});
    service.tick();
  }

  // Exit survey: qualification-gated HIT for everyone who enrolled.
  const std::string qual = "daily-study-participants";
  with_retries([&] { crowd.create_qualification(qual); });
  for (const auto& w : workers) {
    if (!w.enrolled) continue;
    with_retries([&] { crowd.grant_qualification(qual, w.worker_id); });
  }
  result.survey_hit_id =
      with_retries([&] { return crowd.publish_survey_hit(qual, 100); });
  result.qualification_holders =
      static_cast<int>(crowd.qualification_holders(qual).size());

  for (const auto& w : workers) {
    if (!w.enrolled) continue;
    ++result.enrolled;
    const Participant& p = service.store().participant(w.worker_id);
    if (p.state == LifecycleState::Completed) ++result.completed_all;
    const auto* ms = service.store().measurements_of(w.worker_id);
    const int done = ms == nullptr ? 0 : static_cast<int>(ms->size());
    result.measurements += done;
    result.measurements_by_worker[w.worker_id] = done;
    result.scheme_by_worker[w.worker_id] = p.scheme_id;
    result.ledger_total_by_worker[w.worker_id] =
        crowd.ledger_total(w.worker_id);
  }
  for (const auto& [id, n] : service.store().notifications()) {
    if (n.status == NotificationStatus::Sent) ++result.notifications_sent;
  }
  return result;
}

}  // namespace dailystudy
