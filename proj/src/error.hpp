/*
  Copyright 2026 The loadcast Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#ifndef LOADCAST_ERROR_HPP
#define LOADCAST_ERROR_HPP

#include <functional>
#include <stdexcept>
#include <string>

namespace loadcast {

enum class ErrorKind {
  InvalidArgument,  // caller contract breach, bad config
  Io,
  Parse,            // malformed input file
  Data,             // well-formed input that violates a data contract
  Numeric,          // solver failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

enum class LogLevel { Debug = 0, Info = 1, Warning = 2 };

using LogSink = std::function<void(LogLevel, const std::string&)>;

// Process-wide sink. The default drops everything below Warning and writes
// the rest to stderr.
void set_log_sink(LogSink sink);
LogSink default_log_sink();
void log(LogLevel level, const std::string& message);

}  // namespace loadcast

#endif  // LOADCAST_ERROR_HPP
