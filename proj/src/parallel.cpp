#include "vrnmf/parallel.hpp"

#include <cstdlib>
#include <string>

namespace vrnmf {

int default_thread_count() {
    if (const char* env = std::getenv("VRNMF_THREADS")) {
        try {
            const int value = std::stoi(env);
            if (value > 0) {
                return value;
            }
        } catch (const std::exception&) {
            // fall through to auto
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int resolve_threads(int requested) {
    return requested > 0 ? requested : default_thread_count();
}

}  // namespace vrnmf
