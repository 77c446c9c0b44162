#include <cstdlib>
#include <string>

#include "temo/kernels/kernels.hpp"
#include "temo/util/error.hpp"

namespace temo::kernels {
namespace {

bool cpu_has_avx2_fma() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops& select() {
    if (const char* env = std::getenv("TEMO_KERNELS")) {
        std::string want = env;
        if (want == "scalar") return scalar_ops();
        if (want == "avx2") {
            if (const Ops* t = avx2_ops()) return *t;
            raise(ErrorKind::Config,
                  "TEMO_KERNELS=avx2 requested but AVX2+FMA is unavailable");
        }
        raise(ErrorKind::Config,
              "unknown TEMO_KERNELS value '" + want + "' (use scalar or avx2)");
    }
    if (const Ops* t = avx2_ops()) return *t;
    return scalar_ops();
}

}  // namespace

const Ops* avx2_ops() {
    static const Ops* table =
        cpu_has_avx2_fma() ? detail::avx2_table() : nullptr;
    return table;
}

const Ops& ops() {
    // Selection is fixed for the life of the process so results stay
    // reproducible within a run.
    static const Ops& chosen = select();
    return chosen;
}

}  // namespace temo::kernels
