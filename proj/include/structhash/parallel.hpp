#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace structhash {

// Static contiguous split of [0, count) across workers. Each index is
// processed exactly once, so results written to per-index slots do not
// depend on the schedule. threads == 0 means all hardware threads.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    unsigned workers = threads ? threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > count) workers = static_cast<unsigned>(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (count + workers - 1) / workers;
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    };
    for (unsigned w = 1; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run, begin, end);
    }
    run(0, std::min(count, chunk));
    for (auto& th : pool) th.join();
}

}  // namespace structhash
