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

#ifndef DAILYSTUDY_CONFIG_IO_HPP_
#define DAILYSTUDY_CONFIG_IO_HPP_

#include <filesystem>
#include <string>

#include "dailystudy/domain.hpp"
#include "dailystudy/simulator.hpp"

namespace dailystudy {

// Plain-text key = value configuration. Lines starting with '#' and blank
// lines are ignored; keys are snake_case; `scheme` may repeat. Unknown keys
// are rejected so typos fail loudly. The full key list is documented by
// default_study_config_text() / default_sim_config_text(), which `init`
// writes out.
StudyConfig parse_study_config(const std::string& text);
SimConfig parse_sim_config(const std::string& text);

StudyConfig load_study_config(const std::filesystem::path& file);
SimConfig load_sim_config(const std::filesystem::path& file);

std::string default_study_config_text();
std::string default_sim_config_text();

}  // namespace dailystudy

#endif  // DAILYSTUDY_CONFIG_IO_HPP_
