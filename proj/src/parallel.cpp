#include "roomtex/parallel.hpp"

namespace roomtex {

namespace {
int g_workers = 0;
}

int worker_count() {
    if (g_workers > 0) return g_workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_count(int n) { g_workers = n; }

}  // namespace roomtex
