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

#ifndef LOADCAST_FILEIO_HPP
#define LOADCAST_FILEIO_HPP

#include <string>

namespace loadcast {

std::string read_text_file(const std::string& path);

/// Writes to a sibling temporary file, then renames it over `path`, so
/// readers never see a partial file. Parent directories are created.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace loadcast

#endif  // LOADCAST_FILEIO_HPP
