#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace coach {

/// Thread pool where jobs sharing a key run one at a time in submission
/// order, and jobs with different keys run in parallel.
class KeyedSerialExecutor {
public:
    explicit KeyedSerialExecutor(std::size_t threads = 2);
    ~KeyedSerialExecutor();

    KeyedSerialExecutor(const KeyedSerialExecutor&) = delete;
    KeyedSerialExecutor& operator=(const KeyedSerialExecutor&) = delete;

    void submit(const std::string& key, std::function<void()> job);

    /// Blocks until every submitted job has finished.
    void wait_idle();

private:
    void worker();

    std::mutex mu_;
    std::condition_variable work_cv_;
    std::condition_variable idle_cv_;
    std::unordered_map<std::string, std::deque<std::function<void()>>> queues_;
    std::deque<std::string> ready_;
    std::unordered_set<std::string> active_;  // keys queued in ready_ or running
    std::size_t pending_ = 0;
    bool stopping_ = false;
    std::vector<std::thread> threads_;
};

}  // namespace coach
