#pragma once

#include <sys/types.h>

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hogface::testing {

struct RunResult {
    int exit_code = -1;  ///< -1 when killed by a signal
    std::string out;
    std::string err;
};

/// Runs argv[0] with the given arguments to completion, capturing both streams.
RunResult run_process(const std::vector<std::string>& argv, const std::map<std::string, std::string>& env = {});

/// A long-running child whose stdout can be read line by line.
class ChildProcess {
public:
    ChildProcess(const std::vector<std::string>& argv, const std::map<std::string, std::string>& env = {});
    ~ChildProcess();
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    /// Next stdout line, or nullopt on EOF or timeout.
    std::optional<std::string> read_line(std::chrono::milliseconds timeout);
    /// SIGTERM, then waits. Returns the exit code (-1 if signalled).
    int terminate();

private:
    pid_t pid_ = -1;
    int out_fd_ = -1;
    std::string buffer_;
};

}  // namespace hogface::testing
