#include "branchfinder/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace branchfinder::kernels {
namespace {

const KernelTable& select() {
    const KernelTable* avx2 = avx2_table();
    const char* pref = std::getenv("BRANCHFINDER_KERNELS");
    if (pref != nullptr) {
        if (std::strcmp(pref, "scalar") == 0) return scalar_table();
        if (std::strcmp(pref, "avx2") == 0 && avx2 != nullptr) return *avx2;
        // "auto" or anything unrecognized falls through to detection.
    }
    return avx2 != nullptr ? *avx2 : scalar_table();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace branchfinder::kernels
