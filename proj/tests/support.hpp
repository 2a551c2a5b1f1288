#pragma once

#include <cmath>

#include "continuum/continuum.hpp"

namespace testenv {

// 2^20 entries of 1024 bits, 32 per 4 KiB page, 64-bit keys, 1 Gbit memory.
inline continuum::Environment desk(double n = 1 << 20, double memory = 1e9) {
    return {n, 1024, 32, 64, memory, 4096};
}

}  // namespace testenv
