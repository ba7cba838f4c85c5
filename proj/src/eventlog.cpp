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

#include "dailystudy/eventlog.hpp"

#include <zlib.h>

#include <fstream>
#include <system_error>

#include "dailystudy/errors.hpp"

namespace dailystudy {

namespace {

json parse_record(const std::string& line, std::size_t line_no,
                  const std::filesystem::path& path) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::exception& e) {
    fail(Err::CorruptLog, path.string() + " line " + std::to_string(line_no) +
                              ": unparseable record (" + e.what() + ")");
  }
  if (!rec.is_object() || !rec.contains("crc") || !rec.contains("event")) {
    fail(Err::CorruptLog, path.string() + " line " + std::to_string(line_no) +
                              ": record missing crc/event fields");
  }
  std::uint32_t want = rec["crc"].get<std::uint32_t>();
  std::uint32_t got = EventLog::checksum(rec["event"].dump());
  if (want != got) {
    fail(Err::CorruptLog, path.string() + " line " + std::to_string(line_no) +
                              ": checksum mismatch (stored " +
                              std::to_string(want) + ", computed " +
                              std::to_string(got) + ")");
  }
  return rec["event"];
}

}  // namespace

std::uint32_t EventLog::checksum(const std::string& text) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(text.data()),
              static_cast<uInt>(text.size()));
  return static_cast<std::uint32_t>(crc);
}

EventLog::EventLog(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) fail(Err::StorageError, "cannot create " + dir_.string());

  if (auto snap = load_snapshot()) last_seq_ = snap->last_seq;
  for (const StudyEvent& e : read_tail()) {
    if (e.seq <= last_seq_) {
      fail(Err::CorruptLog,
           "log sequence " + std::to_string(e.seq) +
               " not ahead of snapshot/predecessor " +
               std::to_string(last_seq_));
    }
    last_seq_ = e.seq;
  }
}

StudyEvent EventLog::append(StudyEvent event) {
  event.seq = last_seq_ + 1;
  json rec;
  std::string body = event_to_json(event).dump();
  rec["crc"] = checksum(body);
  rec["event"] = json::parse(body);
  write_line(rec.dump());
  last_seq_ = event.seq;
  return event;
}

void EventLog::write_line(const std::string& line) {
  std::ofstream out(log_path(), std::ios::app | std::ios::binary);
  if (!out) fail(Err::StorageError, "cannot open " + log_path().string());
  out << line << '\n';
  out.flush();
  if (!out) fail(Err::StorageError, "write failed on " + log_path().string());
}

std::vector<StudyEvent> EventLog::read_tail() const {
  std::vector<StudyEvent> events;
  std::ifstream in(log_path(), std::ios::binary);
  if (!in) return events;  // no log yet
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    events.push_back(event_from_json(parse_record(line, line_no, log_path())));
  }
  return events;
}

std::optional<Snapshot> EventLog::load_snapshot() const {
  std::ifstream in(snapshot_path(), std::ios::binary);
  if (!in) return std::nullopt;
  json rec;
  try {
    in >> rec;
  } catch (const json::exception& e) {
    fail(Err::CorruptLog,
         snapshot_path().string() + ": unparseable (" + e.what() + ")");
  }
  std::uint32_t want = rec.at("crc").get<std::uint32_t>();
  std::string body = rec.at("state").dump();
  if (want != checksum(body)) {
    fail(Err::CorruptLog, snapshot_path().string() + ": checksum mismatch");
  }
  Snapshot snap;
  snap.last_seq = rec.at("last_seq").get<std::uint64_t>();
  snap.state = rec.at("state");
  return snap;
}

void EventLog::compact(const json& state, std::uint64_t last_seq) {
  if (last_seq > last_seq_) {
    fail(Err::StorageError, "snapshot sequence " + std::to_string(last_seq) +
                                " ahead of log head " +
                                std::to_string(last_seq_));
  }

  json snap;
  std::string body = state.dump();
  snap["crc"] = checksum(body);
  snap["last_seq"] = last_seq;
  snap["state"] = json::parse(body);

  auto snap_tmp = snapshot_path();
  snap_tmp += ".tmp";
  {
    std::ofstream out(snap_tmp, std::ios::trunc | std::ios::binary);
    if (!out) fail(Err::StorageError, "cannot open " + snap_tmp.string());
    out << snap.dump() << '\n';
    out.flush();
    if (!out) fail(Err::StorageError, "write failed on " + snap_tmp.string());
  }

  auto log_tmp = log_path();
  log_tmp += ".tmp";
  {
    std::ofstream out(log_tmp, std::ios::trunc | std::ios::binary);
    if (!out) fail(Err::StorageError, "cannot open " + log_tmp.string());
    for (const StudyEvent& e : read_tail()) {
      if (e.seq <= last_seq) continue;
      json rec;
      std::string ebody = event_to_json(e).dump();
      rec["crc"] = checksum(ebody);
      rec["event"] = json::parse(ebody);
      out << rec.dump() << '\n';
    }
    out.flush();
    if (!out) fail(Err::StorageError, "write failed on " + log_tmp.string());
  }

  std::error_code ec;
  std::filesystem::rename(snap_tmp, snapshot_path(), ec);
  if (ec) fail(Err::StorageError, "rename failed: " + ec.message());
  std::filesystem::rename(log_tmp, log_path(), ec);
  if (ec) fail(Err::StorageError, "rename failed: " + ec.message());
}

}  // namespace dailystudy
