#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <mutex>

namespace chroma {

// Exponential backoff schedule. Attempt numbering starts at 1; the delay is
// applied before attempts 2..max_attempts.
struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{5000};

  std::chrono::milliseconds delay_before(int attempt) const {
    if (attempt <= 1) return std::chrono::milliseconds{0};
    double ms = static_cast<double>(initial_delay.count());
    for (int i = 2; i < attempt; ++i) ms *= multiplier;
    ms = std::min(ms, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds{static_cast<long long>(ms)};
  }
};

// Token-bucket rate limiter; thread-safe. rate_per_sec <= 0 disables limiting.
class TokenBucket {
 public:
  TokenBucket(double rate_per_sec, double burst)
      : rate_(rate_per_sec),
        capacity_(std::max(1.0, burst)),
        tokens_(std::max(1.0, burst)),
        last_(Clock::now()) {}

  // Blocks until a token is available, then consumes it.
  void acquire() {
    if (rate_ <= 0.0) return;
    std::unique_lock lock(mu_);
    for (;;) {
      refill();
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
      cv_.wait_for(lock, wait);
    }
  }

 private:
  using Clock = std::chrono::steady_clock;

  void refill() {
    const auto now = Clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
  }

  double rate_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace chroma
