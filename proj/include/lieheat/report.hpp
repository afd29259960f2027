#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lieheat {

/// Write via a temporary sibling file and rename, so readers never see a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

/// Parallelism cap: LIE_HEAT_THREADS when set to a positive integer, else the core count.
int thread_cap();

/// Run independent jobs on at most thread_cap() threads; results keep the job order.
void run_jobs(const std::vector<std::function<void()>>& jobs);

}  // namespace lieheat
