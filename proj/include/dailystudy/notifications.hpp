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

#ifndef DAILYSTUDY_NOTIFICATIONS_HPP_
#define DAILYSTUDY_NOTIFICATIONS_HPP_

#include <map>
#include <string>
#include <vector>

#include "dailystudy/clock.hpp"
#include "dailystudy/domain.hpp"
#include "dailystudy/timeutil.hpp"

namespace dailystudy {

class StudyStore;
class EventLog;
class PushGateway;

enum class NotificationKind { Morning, EveningConditional, Reengagement };
enum class NotificationStatus { Pending, Sent, Cancelled, Suppressed };

const char* notification_kind_name(NotificationKind k);
NotificationKind notification_kind_from_name(const std::string& name);
const char* notification_status_name(NotificationStatus s);
NotificationStatus notification_status_from_name(const std::string& name);

struct ScheduledNotification {
  std::string id;
  std::string worker_id;
  NotificationKind kind = NotificationKind::Morning;
  UtcTime fire_at{};
  // Local calendar day the reminder belongs to: a submission on this day
  // suppresses/cancels it.
  LocalDay local_day{};
  NotificationStatus status = NotificationStatus::Pending;
  bool delivered = false;  // meaningful once status == Sent
  int attempts = 0;        // push attempts recorded at resolution
};

json notification_to_json(const ScheduledNotification& n);
ScheduledNotification notification_from_json(const json& j);

// Decides which notification events to emit, given store state, the clock,
// and push-delivery outcomes. All durable state lives in the store and is
// changed only by appending events; the scheduler itself keeps only the
// transient retry counters for not-yet-resolved notifications.
class NotificationScheduler {
 public:
  NotificationScheduler(StudyStore& store, EventLog& log, PushGateway& push,
                        Clock& clock);

  // Schedules the next local day's Morning and EveningConditional reminders
  // after a successful submission. Returns the ids scheduled (empty when the
  // worker is no longer Enrolled/Active or the next day falls outside the
  // study window).
  std::vector<std::string> schedule_after_submission(
      const std::string& worker_id, UtcTime submission_time);

  // Dispatches every Pending notification with fire_at <= now. Morning and
  // Reengagement send unconditionally; EveningConditional sends only if the
  // worker has no measurement for that local day, otherwise it resolves
  // Suppressed. Push failures leave the notification Pending for the next
  // tick, up to max_push_attempts, after which it resolves Sent with
  // delivered=false. Returns ids resolved as Sent.
  std::vector<std::string> tick(UtcTime now);

  // Cancels all Pending notifications the worker has for the given local
  // day (used when a submission lands before a reminder fires).
  void cancel_for_day(const std::string& worker_id, LocalDay local_day);

  // Schedules a Reengagement reminder at morning time the day after a missed
  // day. Returns the id, or empty when disabled or the worker is no longer
  // Enrolled/Active.
  std::string schedule_reengagement(const std::string& worker_id,
                                    LocalDay missed_day);

  static constexpr int max_push_attempts = 3;

 private:
  std::string schedule_one(const std::string& worker_id,
                           NotificationKind kind, LocalDay day,
                           MinutesOfDay local_time, UtcTime now);

  StudyStore& store_;
  EventLog& log_;
  PushGateway& push_;
  Clock& clock_;
  // Transient: push attempts for still-Pending notifications. Rebuilt as
  // zeros after replay, which only widens the retry budget.
  std::map<std::string, int> attempts_;
};

}  // namespace dailystudy

#endif  // DAILYSTUDY_NOTIFICATIONS_HPP_
