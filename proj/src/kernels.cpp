#include "stkit/kernels.hpp"

#include <cstdlib>
#include <string>

namespace stkit::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(STKIT_HAVE_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* pick_default() {
#ifdef STKIT_HAVE_AVX2
    if (cpu_has_avx2()) return &avx2_ops;
#endif
    return &scalar_ops;
}

const Ops* resolve(std::string_view name) {
    if (name == "scalar") return &scalar_ops;
#ifdef STKIT_HAVE_AVX2
    if (name == "avx2" && cpu_has_avx2()) return &avx2_ops;
#endif
    return nullptr;
}

const Ops* init() {
    if (const char* env = std::getenv("STKIT_KERNELS")) {
        if (const Ops* o = resolve(env)) return o;
    }
    return pick_default();
}

const Ops*& current() {
    static const Ops* cur = init();
    return cur;
}

} // namespace

const Ops& active() { return *current(); }

bool select(std::string_view name) {
    if (const Ops* o = resolve(name)) {
        current() = o;
        return true;
    }
    return false;
}

std::vector<std::string> available() {
    std::vector<std::string> names{std::string(scalar_ops.name)};
#ifdef STKIT_HAVE_AVX2
    if (cpu_has_avx2()) names.push_back(std::string(avx2_ops.name));
#endif
    return names;
}

} // namespace stkit::kernels
