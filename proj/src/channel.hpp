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

#ifndef LOADCAST_CHANNEL_HPP
#define LOADCAST_CHANNEL_HPP

#include <optional>
#include <string_view>

namespace loadcast {

enum class Channel { Load = 0, Temperature = 1 };

inline std::string_view channel_name(Channel c) {
  return c == Channel::Load ? "load" : "temperature";
}

inline std::optional<Channel> parse_channel(std::string_view s) {
  if (s == "load" || s == "L") return Channel::Load;
  if (s == "temperature" || s == "temp" || s == "T") return Channel::Temperature;
  return std::nullopt;
}

}  // namespace loadcast

#endif  // LOADCAST_CHANNEL_HPP
