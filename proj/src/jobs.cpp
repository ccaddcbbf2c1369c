#include "coach/jobs.hpp"

#include <spdlog/spdlog.h>

namespace coach {

KeyedSerialExecutor::KeyedSerialExecutor(std::size_t threads) {
    if (threads == 0) threads = 1;
    for (std::size_t i = 0; i < threads; ++i) threads_.emplace_back([this] { worker(); });
}

KeyedSerialExecutor::~KeyedSerialExecutor() {
    wait_idle();
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    work_cv_.notify_all();
    for (auto& t : threads_) t.join();
}

void KeyedSerialExecutor::submit(const std::string& key, std::function<void()> job) {
    {
        std::lock_guard lock(mu_);
        queues_[key].push_back(std::move(job));
        ++pending_;
        if (active_.insert(key).second) ready_.push_back(key);
    }
    work_cv_.notify_one();
}

void KeyedSerialExecutor::wait_idle() {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [this] { return pending_ == 0; });
}

void KeyedSerialExecutor::worker() {
    for (;;) {
        std::string key;
        std::function<void()> job;
        {
            std::unique_lock lock(mu_);
            work_cv_.wait(lock, [this] { return stopping_ || !ready_.empty(); });
            if (ready_.empty()) return;
            key = std::move(ready_.front());
            ready_.pop_front();
            auto& q = queues_[key];
            job = std::move(q.front());
            q.pop_front();
        }
        try {
            job();
        } catch (const std::exception& e) {
            spdlog::error("background job for {} failed: {}", key, e.what());
        }
        bool more = false;
        {
            std::lock_guard lock(mu_);
            auto it = queues_.find(key);
            if (it->second.empty()) {
                queues_.erase(it);
                active_.erase(key);
            } else {
                ready_.push_back(key);
                more = true;
            }
            --pending_;
            if (pending_ == 0) idle_cv_.notify_all();
        }
        if (more) work_cv_.notify_one();
    }
}

}  // namespace coach
