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

#ifndef DAILYSTUDY_HTTP_API_HPP_
#define DAILYSTUDY_HTTP_API_HPP_

#include <memory>
#include <string>

#include "dailystudy/service.hpp"

namespace httplib {
class Server;
}

namespace dailystudy {

json pay_quote_to_json(const PayQuote& q);

// JSON-over-HTTP front end for the mobile client and the HIT validation
// page:
//   POST /enroll/start        {device_id, device_model, timezone,
//                              consent, demographics}        -> {staged}
//   POST /enroll/measurement  {device_id, scroll_rounds, swipe_rounds,
//                              duration_seconds}              -> {code}
//   POST /enroll/validate     {worker_id, assignment_id, code} -> {decision}
//   POST /measurement         {worker_id, scroll_rounds, swipe_rounds,
//                              duration_seconds}              -> PayQuote
//   GET  /earnings?worker_id=W                                -> PayQuote
// Errors come back as {"error": <name>, "message": <text>} with a mapped
// status code.
class HttpApi {
 public:
  explicit HttpApi(StudyService& service);
  ~HttpApi();

  // Binds to an ephemeral port on host and returns it.
  int bind_any(const std::string& host);
  // Serves until stop(); call from a dedicated thread after bind_any.
  bool listen_after_bind();
  // Binds host:port and serves until stop().
  bool listen(const std::string& host, int port);
  void stop();

  httplib::Server& server() { return *server_; }

 private:
  StudyService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace dailystudy

#endif  // DAILYSTUDY_HTTP_API_HPP_
