// Copyright 2026 The mcqa-probe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcqa_probe/errors.h"

namespace mcqa_probe {

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(line == 0 ? message
                      : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace mcqa_probe
