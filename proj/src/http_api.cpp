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

#include "dailystudy/http_api.hpp"

#include <httplib.h>

#include "dailystudy/errors.hpp"

namespace dailystudy {

namespace {

int status_for(Err code) {
  switch (code) {
    case Err::ValidationError:
    case Err::BadConfig:
    case Err::InvalidMeasurement:
    case Err::ConsentIncomplete:
      return 400;
    case Err::UnknownWorker:
    case Err::UnknownZone:
    case Err::UnknownAssignment:
      return 404;
    case Err::DuplicateDay:
    case Err::IllegalTransition:
    case Err::AlreadyResolved:
    case Err::DuplicateHit:
      return 409;
    case Err::WindowExpired:
    case Err::OutOfWindow:
      return 410;
    case Err::GatewayError:
      return 502;
    default:
      return 500;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler body, translating exceptions into JSON error replies.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const StudyError& e) {
    reply(res, status_for(e.code()),
          json{{"error", err_name(e.code())}, {"message", e.what()}});
  } catch (const json::exception& e) {
    reply(res, 400, json{{"error", "BadRequest"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    reply(res, 500, json{{"error", "Internal"}, {"message", e.what()}});
  }
}

MeasurementPayload measurement_payload(const json& body) {
  MeasurementPayload p;
  p.scroll_rounds = rounds_from_json(body.at("scroll_rounds"));
  p.swipe_rounds = rounds_from_json(body.at("swipe_rounds"));
  p.duration_seconds = body.at("duration_seconds").get<int>();
  return p;
}

}  // namespace

json pay_quote_to_json(const PayQuote& q) {
  return json{{"next_bonus_cents", q.next_bonus},
              {"cumulative_cents", q.cumulative},
              {"remaining_potential_cents", q.remaining_potential},
              {"equivalent_hourly_dollars", q.equivalent_hourly}};
}

HttpApi::HttpApi(StudyService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  server_->Post("/enroll/start", [this](const httplib::Request& req,
                                        httplib::Response& res) {
    guarded(res, [&] {
      json body = json::parse(req.body);
      EnrollmentStart start;
      start.device_id = body.at("device_id").get<std::string>();
      start.device_model = body.at("device_model").get<std::string>();
      start.timezone = body.at("timezone").get<std::string>();
      start.demographics = demographics_from_json(body.at("demographics"));
      start.consent = consent_from_json(body.at("consent"));
      service_.start_enrollment(start);
      reply(res, 200, json{{"staged", true}});
    });
  });

  server_->Post("/enroll/measurement", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    guarded(res, [&] {
      json body = json::parse(req.body);
      std::string code = service_.submit_first_measurement(
          body.at("device_id").get<std::string>(), measurement_payload(body));
      reply(res, 200, json{{"code", code}});
    });
  });

  server_->Post("/enroll/validate", [this](const httplib::Request& req,
                                           httplib::Response& res) {
    guarded(res, [&] {
      json body = json::parse(req.body);
      std::string decision = service_.validate_submission(
          body.at("worker_id").get<std::string>(),
          body.at("assignment_id").get<std::string>(),
          body.at("code").get<std::string>());
      reply(res, 200, json{{"decision", decision}});
    });
  });

  server_->Post("/measurement", [this](const httplib::Request& req,
                                       httplib::Response& res) {
    guarded(res, [&] {
      json body = json::parse(req.body);
      SubmitResult result = service_.submit_measurement(
          body.at("worker_id").get<std::string>(), measurement_payload(body));
      json out = pay_quote_to_json(result.quote);
      out["study_day"] = result.study_day;
      out["bonus_cents"] = result.bonus;
      reply(res, 200, out);
    });
  });

  server_->Get("/earnings", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    guarded(res, [&] {
      if (!req.has_param("worker_id")) {
        fail(Err::ValidationError, "worker_id query parameter required");
      }
      PayQuote q = service_.earnings(req.get_param_value("worker_id"));
      reply(res, 200, pay_quote_to_json(q));
    });
  });
}

HttpApi::~HttpApi() = default;

int HttpApi::bind_any(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool HttpApi::listen_after_bind() { return server_->listen_after_bind(); }

bool HttpApi::listen(const std::string& host, int port) {
  return server_->listen(host, port);
}

void HttpApi::stop() { server_->stop(); }

}  // namespace dailystudy
