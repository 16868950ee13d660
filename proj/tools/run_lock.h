// Copyright 2026 The sftmix Authors.
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

#ifndef SFTMIX_TOOLS_RUN_LOCK_H_
#define SFTMIX_TOOLS_RUN_LOCK_H_

#include <filesystem>

namespace sftmix::tools {

// Exclusive advisory lock on <run_dir>/LOCK, released on destruction or
// process death. Throws LedgerLockedError when another process holds it.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& run_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace sftmix::tools

#endif  // SFTMIX_TOOLS_RUN_LOCK_H_
