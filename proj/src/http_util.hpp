#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>
#include <thread>

namespace llmens::detail {

struct ParsedUrl {
    std::string base;  // scheme://host[:port], what httplib::Client takes
    std::string path;  // leading slash
};

inline ParsedUrl parse_url(const std::string& url, const std::string& default_path) {
    const auto scheme_end = url.find("://");
    const std::size_t authority_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', authority_start);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.base = url;
        out.path = default_path;
    } else {
        out.base = url.substr(0, path_start);
        out.path = url.substr(path_start);
        if (out.path == "/") out.path = default_path;
    }
    return out;
}

// Counting semaphore bounding concurrent HTTP requests.
class RequestLimiter {
  public:
    explicit RequestLimiter(int limit) : available_(limit) {}

    void acquire() {
        std::unique_lock lock(m_);
        cv_.wait(lock, [this] { return available_ > 0; });
        --available_;
    }
    void release() {
        {
            std::lock_guard lock(m_);
            ++available_;
        }
        cv_.notify_one();
    }

  private:
    std::mutex m_;
    std::condition_variable cv_;
    int available_;
};

class RequestGuard {
  public:
    explicit RequestGuard(RequestLimiter& l) : l_(l) { l_.acquire(); }
    ~RequestGuard() { l_.release(); }
    RequestGuard(const RequestGuard&) = delete;
    RequestGuard& operator=(const RequestGuard&) = delete;

  private:
    RequestLimiter& l_;
};

inline void backoff_sleep(int attempt, int base_ms) {
    // 250ms, 500ms, 1000ms, ... for base_ms = 250
    const auto delay = std::chrono::milliseconds(static_cast<long>(base_ms) << attempt);
    std::this_thread::sleep_for(delay);
}

}  // namespace llmens::detail
