#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vhpf {

/// Worker cap from VHPF_THREADS; unset, empty, or 0 means sequential.
inline int thread_count_from_env() {
  const char* v = std::getenv("VHPF_THREADS");
  if (!v || !*v) return 0;
  try {
    return std::max(0, std::stoi(v));
  } catch (...) {
    return 0;
  }
}

/// Fixed fork-join pool. run(n, fn) calls fn(i) for i in [0, n) and
/// returns once all calls finished. Each index is handled by exactly one
/// worker, so writes to per-index slots need no synchronization.
class WorkerPool {
 public:
  explicit WorkerPool(int workers) {
    for (int w = 1; w < workers; ++w) threads_.emplace_back([this, w] { loop(w); });
    workers_ = std::max(1, workers);
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int workers() const { return workers_; }

  void run(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (threads_.empty() || n < 2) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    {
      std::lock_guard lock(mu_);
      job_ = &fn;
      count_ = n;
      pending_ = static_cast<int>(threads_.size());
      ++generation_;
    }
    cv_.notify_all();
    work(0);
    std::unique_lock lock(mu_);
    done_.wait(lock, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void work(int w) {
    for (std::size_t i = static_cast<std::size_t>(w); i < count_; i += static_cast<std::size_t>(workers_)) (*job_)(i);
  }

  void loop(int w) {
    std::size_t seen = 0;
    for (;;) {
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
      }
      work(w);
      {
        std::lock_guard lock(mu_);
        --pending_;
      }
      done_.notify_one();
    }
  }

  std::vector<std::thread> threads_;
  int workers_ = 1;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t count_ = 0;
  int pending_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace vhpf
