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

#ifndef DAILYSTUDY_EVENTLOG_HPP_
#define DAILYSTUDY_EVENTLOG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dailystudy/domain.hpp"

namespace dailystudy {

// Snapshot of materialized state at a log position. The state payload is the
// StudyStore's own JSON dump; the log does not interpret it.
struct Snapshot {
  std::uint64_t last_seq = 0;
  json state;
};

// Append-only newline-delimited JSON log. Each line holds one record:
//
//   {"crc": <uint32>, "event": {<StudyEvent fields>}}
//
// where crc is the CRC-32 (zlib polynomial) of the compact serialization of
// the "event" object. nlohmann::json keeps object keys sorted, so the compact
// dump is canonical and the checksum is reproducible on read. A snapshot, if
// present, lives beside the log as snapshot.json:
//
//   {"crc": <uint32>, "last_seq": <uint64>, "state": {...}}
class EventLog {
 public:
  // Opens (creating if needed) the log under `dir`. Scans any existing
  // snapshot and tail to recover the last assigned sequence number, so
  // appends after crash recovery continue numbering without gaps.
  explicit EventLog(std::filesystem::path dir);

  // Assigns the next sequence number, writes the record durably, and returns
  // the event as written. Throws StorageError if the write cannot complete;
  // a failed append leaves the file unchanged (the record is buffered and
  // flushed as one line).
  StudyEvent append(StudyEvent event);

  // All events currently in the log file (events after the snapshot point,
  // if the log has been compacted). Throws CorruptLog naming the first bad
  // line on checksum mismatch or unparseable record.
  std::vector<StudyEvent> read_tail() const;

  std::optional<Snapshot> load_snapshot() const;

  // Writes a snapshot at `last_seq` and drops log records with seq <=
  // last_seq. Both files are replaced atomically (write temp + rename).
  void compact(const json& state, std::uint64_t last_seq);

  std::uint64_t last_seq() const { return last_seq_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path log_path() const { return dir_ / "events.ndjson"; }
  std::filesystem::path snapshot_path() const {
    return dir_ / "snapshot.json";
  }

  static std::uint32_t checksum(const std::string& text);

 private:
  void write_line(const std::string& line);

  std::filesystem::path dir_;
  std::uint64_t last_seq_ = 0;
};

}  // namespace dailystudy

#endif  // DAILYSTUDY_EVENTLOG_HPP_
