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

#include "dailystudy/notifications.hpp"

#include "dailystudy/errors.hpp"
#include "dailystudy/eventlog.hpp"
#include "dailystudy/gateway.hpp"
#include "dailystudy/store.hpp"

namespace dailystudy {

const char* notification_kind_name(NotificationKind k) {
  switch (k) {
    case NotificationKind::Morning: return "Morning";
    case NotificationKind::EveningConditional: return "EveningConditional";
    case NotificationKind::Reengagement: return "Reengagement";
  }
  return "?";
}

NotificationKind notification_kind_from_name(const std::string& name) {
  for (NotificationKind k :
       {NotificationKind::Morning, NotificationKind::EveningConditional,
        NotificationKind::Reengagement}) {
    if (name == notification_kind_name(k)) return k;
  }
  fail(Err::CorruptLog, "unknown notification kind '" + name + "'");
}

const char* notification_status_name(NotificationStatus s) {
  switch (s) {
    case NotificationStatus::Pending: return "Pending";
    case NotificationStatus::Sent: return "Sent";
    case NotificationStatus::Cancelled: return "Cancelled";
    case NotificationStatus::Suppressed: return "Suppressed";
  }
  return "?";
}

NotificationStatus notification_status_from_name(const std::string& name) {
  for (NotificationStatus s :
       {NotificationStatus::Pending, NotificationStatus::Sent,
        NotificationStatus::Cancelled, NotificationStatus::Suppressed}) {
    if (name == notification_status_name(s)) return s;
  }
  fail(Err::CorruptLog, "unknown notification status '" + name + "'");
}

json notification_to_json(const ScheduledNotification& n) {
  return json{{"id", n.id},
              {"worker_id", n.worker_id},
              {"kind", notification_kind_name(n.kind)},
              {"fire_at", format_utc(n.fire_at)},
              {"local_day", format_local_day(n.local_day)},
              {"status", notification_status_name(n.status)},
              {"delivered", n.delivered},
              {"attempts", n.attempts}};
}

ScheduledNotification notification_from_json(const json& j) {
  ScheduledNotification n;
  n.id = j.at("id").get<std::string>();
  n.worker_id = j.at("worker_id").get<std::string>();
  n.kind = notification_kind_from_name(j.at("kind").get<std::string>());
  n.fire_at = parse_utc(j.at("fire_at").get<std::string>());
  n.local_day = parse_local_day(j.at("local_day").get<std::string>());
  n.status = notification_status_from_name(j.at("status").get<std::string>());
  n.delivered = j.at("delivered").get<bool>();
  n.attempts = j.at("attempts").get<int>();
  return n;
}

NotificationScheduler::NotificationScheduler(StudyStore& store, EventLog& log,
                                             PushGateway& push, Clock& clock)
    : store_(store), log_(log), push_(push), clock_(clock) {}

std::string NotificationScheduler::schedule_one(const std::string& worker_id,
                                                NotificationKind kind,
                                                LocalDay day,
                                                MinutesOfDay local_time,
                                                UtcTime now) {
  const Participant& p = store_.participant(worker_id);
  TimeZone tz = TimeZone::of(p.timezone);
  std::string id =
      "ntf-" + std::to_string(store_.next_notification_number());
  StudyEvent e;
  e.at = now;
  e.kind = EventKind::NotificationScheduled;
  e.worker_id = worker_id;
  e.payload = json{{"notification_id", id},
                   {"kind", notification_kind_name(kind)},
                   {"fire_at", format_utc(tz.at_local(day, local_time))},
                   {"local_day", format_local_day(day)}};
  record_event(store_, log_, std::move(e));
  return id;
}

std::vector<std::string> NotificationScheduler::schedule_after_submission(
    const std::string& worker_id, UtcTime submission_time) {
  std::vector<std::string> ids;
  const Participant* p = store_.find_participant(worker_id);
  if (!p || (p->state != LifecycleState::Enrolled &&
             p->state != LifecycleState::Active)) {
    return ids;
  }
  TimeZone tz = TimeZone::of(p->timezone);
  LocalDay next_day = tz.local_day(submission_time) + std::chrono::days{1};
  // No reminders past the end of the study window.
  int next_index =
      raw_study_day(*p, tz.at_local(next_day, std::chrono::minutes{0}));
  if (next_index > store_.config().duration_days) return ids;

  UtcTime now = clock_.now();
  ids.push_back(schedule_one(worker_id, NotificationKind::Morning, next_day,
                             store_.config().morning_reminder, now));
  ids.push_back(schedule_one(worker_id, NotificationKind::EveningConditional,
                             next_day, store_.config().evening_reminder, now));
  return ids;
}

std::vector<std::string> NotificationScheduler::tick(UtcTime now) {
  std::vector<std::string> sent;
  // Copy due ids first: resolving mutates the pending index.
  std::vector<std::string> due;
  for (const auto& [fire_at, id] : store_.pending_notifications()) {
    if (fire_at > now) break;
    due.push_back(id);
  }
  for (const std::string& id : due) {
    const ScheduledNotification* n = store_.find_notification(id);
    if (!n || n->status != NotificationStatus::Pending) continue;
    const Participant& p = store_.participant(n->worker_id);

    // A worker who finished or dropped out of the window between scheduling
    // and firing never receives the push.
    if (p.state != LifecycleState::Enrolled &&
        p.state != LifecycleState::Active) {
      StudyEvent e;
      e.at = now;
      e.kind = EventKind::NotificationCancelled;
      e.worker_id = n->worker_id;
      e.payload = json{{"notification_id", id},
                       {"suppressed", false},
                       {"attempts", attempts_[id]}};
      record_event(store_, log_, std::move(e));
      attempts_.erase(id);
      continue;
    }

    if (n->kind == NotificationKind::EveningConditional) {
      // Fires only if the worker has not submitted yet that local day.
      int day_index = raw_study_day(p, n->fire_at);
      if (store_.has_measurement(n->worker_id, day_index)) {
        StudyEvent e;
        e.at = now;
        e.kind = EventKind::NotificationCancelled;
        e.worker_id = n->worker_id;
        e.payload = json{{"notification_id", id},
                         {"suppressed", true},
                         {"attempts", attempts_[id]}};
        record_event(store_, log_, std::move(e));
        attempts_.erase(id);
        continue;
      }
    }

    int attempt = ++attempts_[id];
    bool ok = push_.send(p.device_id,
                         notification_kind_name(n->kind) +
                             std::string(" reminder: complete today's tasks"));
    if (!ok && attempt < max_push_attempts) continue;  // retry next tick

    StudyEvent e;
    e.at = now;
    e.kind = EventKind::NotificationSent;
    e.worker_id = n->worker_id;
    e.payload = json{{"notification_id", id},
                     {"delivered", ok},
                     {"attempts", attempt}};
    record_event(store_, log_, std::move(e));
    attempts_.erase(id);
    sent.push_back(id);
  }
  return sent;
}

void NotificationScheduler::cancel_for_day(const std::string& worker_id,
                                           LocalDay local_day) {
  for (const ScheduledNotification* n :
       store_.pending_for_worker_day(worker_id, local_day)) {
    StudyEvent e;
    e.at = clock_.now();
    e.kind = EventKind::NotificationCancelled;
    e.worker_id = worker_id;
    e.payload = json{{"notification_id", n->id},
                     {"suppressed", false},
                     {"attempts", attempts_[n->id]}};
    record_event(store_, log_, std::move(e));
    attempts_.erase(n->id);
  }
}

std::string NotificationScheduler::schedule_reengagement(
    const std::string& worker_id, LocalDay missed_day) {
  if (!store_.config().reengagement_enabled) return "";
  const Participant* p = store_.find_participant(worker_id);
  if (!p || (p->state != LifecycleState::Enrolled &&
             p->state != LifecycleState::Active)) {
    return "";
  }
  LocalDay next_day = missed_day + std::chrono::days{1};
  TimeZone tz = TimeZone::of(p->timezone);
  int next_index =
      raw_study_day(*p, tz.at_local(next_day, std::chrono::minutes{0}));
  if (next_index > store_.config().duration_days) return "";
  // Never double up with an already scheduled Morning reminder.
  for (const ScheduledNotification* n :
       store_.pending_for_worker_day(worker_id, next_day)) {
    if (n->kind == NotificationKind::Morning ||
        n->kind == NotificationKind::Reengagement) {
      return "";
    }
  }
  return schedule_one(worker_id, NotificationKind::Reengagement, next_day,
                      store_.config().morning_reminder, clock_.now());
}

}  // namespace dailystudy
